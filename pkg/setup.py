# Copyright (c) 2024, The entroscope authors.  All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from setuptools import setup, find_packages
import pathlib

here = pathlib.Path(__file__).parent.resolve()

long_description = (here / 'README.md').read_text(encoding='utf-8')

setup(
    name='entroscope',
    version='0.1.0',
    description='Hypothesis testing entropies of finite dimensional '
    'quantum states, with a randomized verification harness',
    long_description=long_description,
    long_description_content_type='text/markdown',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'dask[complete]>=2021.7.1',
        'distributed>=2021.7.1',
        'pyyaml>=5.4',
        'pandas>=1.3',
    ],
    extras_require={
        'test': ['pytest>=7.0'],
    },
    entry_points={
        'console_scripts': [
            'entroscope=entroscope.scripts.cli:console_script',
            'entroscope_compute=entroscope.scripts.compute_entropy:console_script',
            'entroscope_verify=entroscope.scripts.verify_propositions:console_script',
            'entroscope_gen=entroscope.scripts.generate_instances:console_script',
        ],
    },
)
