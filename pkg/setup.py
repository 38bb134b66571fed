from setuptools import setup, find_packages

setup(
    name='skylink',
    version='0.1.0',
    packages=find_packages(exclude=['tests']),
    description='System-level downlink simulation of terrestrial and high-altitude-platform 5G networks.',
    install_requires=[
        'numpy>=2.2',
        'pandas>=2.2',
        'scipy>=1.15',
        'tqdm>=4.66',
    ],
    extras_require={'test': ['pytest>=8.0']},
    entry_points={'console_scripts': ['skylink=skylink.cli:main']},
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License'
    ],
    python_requires='>=3.10',
)
