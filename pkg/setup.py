"""
Setup configuration for spinlab (NMR spin-dynamics laboratory)
"""

from setuptools import setup, find_namespace_packages

setup(
    name="spinlab",
    version="0.1.0",
    description="NMR spin-dynamics laboratory - singlet PPS, tomography, decoupling, Leggett-Garg",
    python_requires=">=3.11",
    packages=find_namespace_packages(include=['src*']),
    install_requires=[
        'numpy>=1.26',
        'scipy>=1.11',
        'matplotlib>=3.8',
        'joblib>=1.3',
    ],
    extras_require={
        'dev': [
            'pytest>=7.4.0',
            'pytest-cov>=4.1.0',
        ]
    },
    entry_points={
        'console_scripts': [
            'spinlab=src.__main__:main',
        ],
    },
    package_data={
        'resources': ['systems/*.json'],
    },
)
