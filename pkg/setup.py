from setuptools import setup, find_packages

setup(
    name='strat-mc',
    version='0.1.0a',
    description='Strategy-aware rewriting and LTL model checking',
    license='Apache Software License 2.0',
    python_requires='>=3.7',
    packages=find_packages('src'),
    package_dir={'': 'src'},
    package_data={'stratmc': ['prelude.rwspec', 'corpus/*.rwspec']},
    install_requires=[
        'graphviz',
        'numpy',
        'progressbar2',
        'tabulate',
        'tele',
    ],
    entry_points={
        'console_scripts': [
            'stratmc=stratmc.cli:main',
        ],
    },
    classifiers=[
        'Intended Audience :: Developers',
        'License :: OSI Approved :: Apache Software License',
        'Topic :: Software Development :: Libraries',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
    ]
)
