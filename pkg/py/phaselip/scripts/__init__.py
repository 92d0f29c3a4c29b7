"""Command-line scripts provided by the phaselip package.
"""
