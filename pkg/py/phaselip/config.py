"""Manage run-time configuration of stability experiments.

The configuration is a process-wide singleton initialized from the packaged
YAML file ``data/config.yaml`` (or an alternate file) and queried with::

    config = phaselip.config.Configuration()
    path = config.get_path('report.json')

Two environment variables take precedence over the file contents:
``PHASELIP_THREADS`` sets the worker count and ``PHASELIP_OUTPUT`` sets the
output path.
"""
from __future__ import print_function, division, absolute_import

import copy
import os
import os.path

import yaml

import desiutil.log


class Configuration(object):
    """Singleton holding the packaged defaults plus any overrides.

    Parameters
    ----------
    file_name : str or None
        Name of the YAML file to load. Only used for the first instance
        created, or after :meth:`reset`. Relative names are looked up in
        the package data directory. Uses ``config.yaml`` when None.
    """
    __instance = None

    @staticmethod
    def reset():
        """Forget the current singleton so the next call reloads a file."""
        Configuration.__instance = None

    def __new__(cls, file_name=None):
        if Configuration.__instance is None:
            instance = object.__new__(cls)
            instance._initialize(file_name)
            Configuration.__instance = instance
        return Configuration.__instance

    def _initialize(self, file_name):
        log = desiutil.log.get_logger()
        if file_name is None:
            file_name = 'config.yaml'
        if not os.path.isabs(file_name):
            file_name = os.path.join(os.path.dirname(__file__), 'data',
                                     file_name)
        self.file_name = file_name
        with open(self.file_name) as f:
            try:
                self._values = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ValueError('Invalid config file {}: {}'.format(
                    self.file_name, e))
        if not isinstance(self._values, dict):
            raise ValueError('Config file {} does not hold a mapping.'.format(
                self.file_name))
        for key in ('output_path', 'threads', 'search', 'family_search',
                    'flatness_samples', 'oversampling'):
            if key not in self._values:
                raise ValueError('Missing config key "{}" in {}.'
                                 .format(key, self.file_name))
        threads = os.getenv('PHASELIP_THREADS')
        if threads is not None:
            try:
                self._values['threads'] = int(threads)
            except ValueError:
                raise ValueError('Invalid PHASELIP_THREADS={}.'.format(threads))
        output = os.getenv('PHASELIP_OUTPUT')
        if output is not None:
            self._values['output_path'] = output
        if self._values['threads'] < 1:
            raise ValueError('Expected threads >= 1, got {}.'
                             .format(self._values['threads']))
        log.debug('Loaded configuration from {}.'.format(self.file_name))

    @property
    def output_path(self):
        return self._values['output_path']

    @property
    def threads(self):
        return self._values['threads']

    @property
    def flatness_samples(self):
        return self._values['flatness_samples']

    def search(self):
        """Return a copy of the default search settings as a dict."""
        return copy.deepcopy(self._values['search'])

    def family_search(self):
        """Return a copy of the settings used to estimate family constants."""
        return copy.deepcopy(self._values['family_search'])

    def oversampling(self, field):
        """Default oversampling of random Parseval families for a field."""
        return self._values['oversampling'][str(field)]

    def set_output_path(self, output_path):
        """Set the path used by :meth:`get_path` for relative file names."""
        self._values['output_path'] = output_path

    def set_threads(self, threads):
        if threads < 1:
            raise ValueError('Expected threads >= 1, got {}.'.format(threads))
        self._values['threads'] = int(threads)

    def get_path(self, name):
        """Prepend this configuration's output path to a file name.

        Absolute names are returned unchanged. The output directory is
        created if needed.

        Parameters
        ----------
        name : str
            A file name relative to the output path or an absolute path.

        Returns
        -------
        str
            The full path.
        """
        if os.path.isabs(name):
            return name
        output_path = os.path.expanduser(os.path.expandvars(self.output_path))
        if not os.path.isdir(output_path):
            os.makedirs(output_path)
        return os.path.join(output_path, name)
