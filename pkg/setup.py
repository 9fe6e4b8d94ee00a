from setuptools import setup

setup(
    name='selfpower',
    description='Exact computations for the congruence x^x = lambda mod p',
    packages=['selfpower'],
    package_data={'selfpower': ['data/*']},
    install_requires=['click', 'numpy', 'pandas', 'scipy'],
    entry_points={
        'console_scripts': [
            'selfpower=selfpower.cli:cli',
        ]
    },
    version='0.1.0',
)
