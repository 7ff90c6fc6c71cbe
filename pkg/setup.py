from setuptools import setup, find_packages
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(name='GridInertia',
    version='0.1.0',
    description='Swing-equation simulation of power grids with adaptive-inertia virtual synchronous generators.',
    long_description=long_description,
    long_description_content_type='text/markdown',
    license='MIT',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
    ],

    keywords='power grid swing equation virtual inertia frequency stability rocof',

    packages=find_packages(exclude=['contrib', 'docs', 'tests']),
    py_modules=['run_analysis'],
    python_requires='>=3.8',

    # lmfit >= 1.0 for the Model interface used by the tail and deadband fits
    install_requires=['numpy', 'scipy', 'networkx', 'uncertainties', 'lmfit>=1.0', 'astropy'],

    # $ pip install -e .[test]
    extras_require={
        'test': ['pytest'],
    },

    package_data={
        '': ['*.rst', '*.md', '*.json'],
    },
    include_package_data=True,

    entry_points={
        'console_scripts': [
            'gridinertia=gridinertia.cli:main',
            'gridinertia-example=run_analysis:main',
        ],
    },
)
