#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="feshrf",
    version="0.1.0",
    license="Apache 2.0 License",
    author="Shuang Song",
    author_email="songshgeo@gmail.com",
    description="RF association lineshapes of Feshbach molecules in harmonic traps",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(include=["feshrf", "feshrf.*"]),
    package_data={"feshrf": ["conf/*.yaml"]},
    python_requires=">=3.9,<3.12",
    install_requires=[
        "numpy>=1.26",
        "scipy>=1.11",
        "pandas>=2.1",
        "hydra-core~=1.3",
        "loguru~=0.7",
        "pendulum~=2.0",
        "typing-extensions>=4.10",
        "click>=8.1",
        "mpmath>=1.3",
    ],
    entry_points={"console_scripts": ["feshrf=feshrf.cli:cli"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "Operating System :: OS Independent",
    ],
)
