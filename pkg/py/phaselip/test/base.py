"""Base class for tests that write files.
"""
import os
import shutil
import tempfile
import unittest

import phaselip.config


class Tester(unittest.TestCase):
    """Point the configuration at a temporary output path for each class.
    """
    @classmethod
    def setUpClass(cls):
        cls.tmpdir = tempfile.mkdtemp()
        cls.origdir = os.getcwd()
        os.chdir(cls.tmpdir)
        phaselip.config.Configuration.reset()
        config = phaselip.config.Configuration()
        config.set_output_path(cls.tmpdir)
        config.set_threads(1)

    @classmethod
    def tearDownClass(cls):
        os.chdir(cls.origdir)
        if os.path.isdir(cls.tmpdir):
            shutil.rmtree(cls.tmpdir)
        phaselip.config.Configuration.reset()
