from setuptools import setup


setup(name='VIF',
      version='0.1.0',
      description='VortexInfluenceFunctional',
      packages=['VIF'],
      package_data={'VIF': ['defaults.yaml']},
      python_requires='>=3.8',
      install_requires=['numpy>=1.20',
                        'scipy>=1.8',
                        'pyyaml'],
      extras_require={'test': ['pytest'],
                      'docs': ['sphinx', 'sphinx_rtd_theme', 'recommonmark']},
      entry_points={'console_scripts': ['vif=VIF.cli:main']})
