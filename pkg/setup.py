from setuptools import find_packages, setup

setup(name='bayes-trials',
      version='0.3.0',
      packages=find_packages(exclude=('tests', )),
      license='LICENSE.txt',
      description='Bayesian clinical trial design and operating '
      'characteristics.',
      long_description='Posterior computation, historical borrowing, '
      'interim decision rules, exact and simulated operating '
      'characteristics, Type I error and assurance calibration, and '
      'dose-finding designs, driven by an auditable JSON configuration.',
      install_requires=('jsonschema>=3.2.0', 'numpy>=1.22', 'scipy>=1.12',
                        'typing_extensions>=3.7.4'),
      extras_require={'tests': ('pytest>=7', )},
      python_requires='>=3.9',
      entry_points={
          'console_scripts': [
              'bayes-trials = bayes_trials.scripts:main',
              'bayes-trials-simulate = bayes_trials.scripts:simulate',
              'bayes-trials-oc = bayes_trials.scripts:oc',
              'bayes-trials-calibrate = bayes_trials.scripts:calibrate',
              'bayes-trials-dose-find = bayes_trials.scripts:dose_find',
              'bayes-trials-report = bayes_trials.scripts:report'
          ]
      })
