from setuptools import setup
from os import path

here = path.abspath(path.dirname(__file__))
with open(path.join(here, 'README.rst')) as readme_file:
    long_description = readme_file.read()

setup(
    name='conetorsion',

    description='Conetorsion compares conical and orbifold analytic torsion on cones over '
                'sphere quotients.',
    long_description=long_description,

    url='http://emt.uni-paderborn.de',
    author='Measurement Engineering Group',
    license='BSD',

    # Automatically generate version number from git tags
    use_scm_version={'fallback_version': '0.1.0'},

    packages=[
        'conetorsion'
    ],

    # Additional data
    package_data={
        'conetorsion': ['defaults.json'],
    },

    entry_points={
        'console_scripts': ['torsionctl=conetorsion.cli:main'],
    },

    # Runtime dependencies
    install_requires=[
        'numpy',
        'scipy',
        'mpmath'
    ],

    # Setup/build dependencies; setuptools_scm required for git-based versioning
    setup_requires=['setuptools_scm'],

    # Test dependencies
    tests_require=['pytest', 'sympy'],
    extras_require={'test': ['pytest', 'sympy']},

    # For a list of valid classifiers, see
    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers for full list.
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
