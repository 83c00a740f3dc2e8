#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

import os

import numpy as np
import pytest

from feshrf.errors import ConfigurationError
from feshrf.tools.func import (
    is_strictly_increasing,
    make_list,
    parse_range,
    worker_count,
)
from feshrf.tools.regex import FIELD_COMMENT, MODULE_NAME


@pytest.mark.parametrize(
    "element, keep_none, expected",
    [
        (None, False, []),
        (None, True, [None]),
        (1, False, [1]),
        ((1, 2), False, [1, 2]),
        ([3], False, [3]),
        (np.array([1.0, 2.0]), False, [1.0, 2.0]),
    ],
    ids=["none", "keep none", "scalar", "tuple", "list", "array"],
)
def test_make_list(element, keep_none, expected):
    """把输入变成列表"""
    assert make_list(element, keep_none) == expected


# Happy path tests
@pytest.mark.parametrize(
    "text, expected",
    [
        ("1:3:1", [1.0, 2.0, 3.0]),
        ("0:1:0.25", [0.0, 0.25, 0.5, 0.75, 1.0]),
        ("1:2.5:1", [1.0, 2.0]),
        (" 5 : 5 : 1 ", [5.0]),
        ("-1e3:1e3:1e3", [-1000.0, 0.0, 1000.0]),
    ],
    ids=[
        "integers",
        "fractions",
        "stop off grid",
        "single point",
        "exponents",
    ],
)
def test_parse_range(text, expected):
    """start:stop:step 网格包含终点"""
    np.testing.assert_allclose(parse_range(text), expected)


# Error cases
@pytest.mark.parametrize(
    "text, message",
    [
        ("1:2", "start:stop:step"),
        ("a:b:c", "start:stop:step"),
        ("1:2:0", "step"),
        ("1:2:-1", "step"),
        ("2:1:1", "stop"),
    ],
    ids=["two parts", "not numbers", "zero step", "negative step", "reversed"],
)
def test_parse_range_errors(text, message):
    """非法网格报配置错误，并给出选项名"""
    with pytest.raises(ConfigurationError, match=message) as info:
        parse_range(text, "--field-range")
    assert "--field-range" in str(info.value)


@pytest.mark.parametrize(
    "values, expected",
    [([1, 2, 3], True), ([1, 1, 2], False), ([3, 2], False), ([1], True)],
    ids=["increasing", "repeated", "decreasing", "single"],
)
def test_is_strictly_increasing(values, expected):
    """严格递增"""
    assert is_strictly_increasing(values) is expected


def test_worker_count():
    """未给出线程数时使用全部核心"""
    assert worker_count(None) == (os.cpu_count() or 1)
    assert worker_count(3) == 3
    with pytest.raises(ConfigurationError, match="threads"):
        worker_count(0)


@pytest.mark.parametrize(
    "line, expected",
    [
        ("# b_field_gauss=545.994", 545.994),
        ("#b_field_gauss = 546", 546.0),
        ("# b_field_gauss=5.46e2", 546.0),
        ("# field=545", None),
    ],
    ids=["plain", "spaces", "exponent", "other comment"],
)
def test_field_comment(line, expected):
    """磁场注释行"""
    match = FIELD_COMMENT.match(line)
    if expected is None:
        assert match is None
    else:
        assert float(match.group(1)) == expected


@pytest.mark.parametrize(
    "name, valid",
    [("pulse", True), ("fit_2", True), ("_hidden", False), ("Pulse", False)],
)
def test_module_name(name, valid):
    """组件名称"""
    assert bool(MODULE_NAME.fullmatch(name)) is valid
