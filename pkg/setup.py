#!/usr/bin/env python
# vim: set fileencoding=utf-8 :

# I used the following resources to compile the packaging boilerplate:
# https://python-packaging.readthedocs.io/en/latest/
# https://packaging.python.org/distributing/#requirements-for-packaging-and-distributing

from setuptools import find_packages, setup


def readme():
    with open('README.md') as f:
        return f.read()


setup(name='tras-stbc-analysis',
      version='0.1.0',
      description='Exact and asymptotic error rate / outage analysis of '
                  'joint transmit and receive antenna selection with '
                  'orthogonal space-time block codes over Nakagami-m '
                  'fading with feedback errors, and a Monte Carlo '
                  'validator.',
      long_description=readme(),
      license='LGPL',
      classifiers=[
          # How mature is this project? Common values are
          #   3 - Alpha
          #   4 - Beta
          #   5 - Production/Stable
          'Development Status :: 3 - Alpha',

          # Indicate who your project is intended for
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Mathematics',

          # Environment
          'Operating System :: POSIX :: Linux',
          'Environment :: Console',
          'Natural Language :: English',

          # Pick your license as you wish (should match "license" above)
          'License :: OSI Approved :: GNU Lesser General Public License v3 (LGPLv3)',

          # Specify the Python versions you support here.
          'Programming Language :: Python :: 3.10',
          'Programming Language :: Python :: 3.11',
      ],
      keywords='mimo antenna selection stbc nakagami feedback errors',
      packages=find_packages(exclude=['scripts', 'tests']),
      # Install the scripts
      scripts=[
          'scripts/tras_stbc.py',
      ],
      install_requires=[
          # Extended precision evaluation of the alternating mixtures
          'mpmath',
          'multiprocessing-logging>=0.3.4',
          'numpy',
          # Run configurations
          'pydantic>=2.0',
          # To parse the configuration files:
          'pyyaml>=6.0',
          # Special functions, quadrature and statistical tests
          'scipy',
          # A progress bar
          'tqdm',
      ],
      extras_require={
          'test': ['pytest'],
      })
