# -*- coding: utf-8 -*-
#
# phaselip documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

from __future__ import absolute_import, division, print_function, unicode_literals

import sys
import os
import os.path

# The package lives in ../py.
sys.path.insert(0, os.path.abspath('../py'))

# -- General configuration ------------------------------------------------

try:
    import sphinx.ext.napoleon
    napoleon_extension = 'sphinx.ext.napoleon'
except ImportError:
    try:
        import sphinxcontrib.napoleon
        napoleon_extension = 'sphinxcontrib.napoleon'
        needs_sphinx = '1.2'
    except ImportError:
        needs_sphinx = '1.3'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon'
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3/', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'astropy': ('https://docs.astropy.org/en/stable/', None),
    }

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'phaselip'
copyright = '2026, phaselip developers'

__import__(project)
package = sys.modules[project]

# The short X.Y version.
version = package.__version__.split('-', 1)[0]
# The full version, including alpha/beta/rc tags.
release = package.__version__

exclude_patterns = ['_build']
add_function_parentheses = True
pygments_style = 'sphinx'
keep_warnings = True

# Include functions that begin with an underscore, e.g. _private().
napoleon_include_private_with_doc = True

# Modules mocked up when the docs are built without the full stack.
autodoc_mock_imports = ['astropy',
                        'astropy.table',
                        'desiutil',
                        'desiutil.log',
                        'numpy',
                        'scipy',
                        'scipy.linalg',
                        'scipy.stats',
                        'yaml']

# -- Options for HTML output ----------------------------------------------

try:
    import sphinx_rtd_theme
    html_theme = 'sphinx_rtd_theme'
    html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
except ImportError:
    pass

htmlhelp_basename = 'phaselipdoc'

# -- Options for LaTeX, manual page and Texinfo output --------------------

latex_elements = {}

latex_documents = [
  ('index', 'phaselip.tex', 'phaselip Documentation',
   'phaselip developers', 'manual'),
]

man_pages = [
    ('index', 'phaselip', 'phaselip Documentation',
     ['phaselip developers'], 1)
]

texinfo_documents = [
  ('index', 'phaselip', 'phaselip Documentation',
   'phaselip developers', 'phaselip',
   'Stability constants of phase retrieval on prior sets.',
   'Miscellaneous'),
]
