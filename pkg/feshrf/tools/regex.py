#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
This module contains some commonly used regular expressions for checking
names and options.
这个模块里存储一些检查名称和命令行选项常用的正则表达式。
"""
import re

# 配置段的名称应该符合蛇形命名法，且不能以下划线开头
# Section name is snake case and should not start with an underscore
MODULE_NAME = re.compile(r"[a-z][a-z0-9_]*")

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"

# start:stop:step, e.g. "-50e3:150e3:1e3"
RANGE = re.compile(rf"^\s*({_NUMBER})\s*:\s*({_NUMBER})\s*:\s*({_NUMBER})\s*$")

# comment line carrying the field of a spectrum file,
# e.g. "# b_field_gauss=545.994"
FIELD_COMMENT = re.compile(rf"^#\s*b_field_gauss\s*=\s*({_NUMBER})\s*$")
