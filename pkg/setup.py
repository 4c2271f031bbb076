from setuptools import setup, find_packages
from pathlib import Path

from stground import __version__

long_description = Path('README.md').read_text()

setup(
    name='stground',
    packages=find_packages(exclude=['tests']),
    version=__version__,
    license='MIT',
    description='Self-supervised spatio-temporal grounding on precomputed video and text features',
    long_description=long_description,
    long_description_content_type='text/markdown',
    keywords=['grounding', 'optimal-transport', 'sinkhorn', 'contrastive-learning', 'video'],
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3.8',
    ],
    python_requires='>=3.8',
    install_requires=[
        'numpy',
        'scipy',
        'python-dotenv',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': ['stground=stground.cli:main'],
    },
)
