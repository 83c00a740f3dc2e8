#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
这个模块储存一些通用的小工具。
Small helpers shared by several modules.
"""

from __future__ import annotations

import os
from typing import Any, List, Optional

import numpy as np

from feshrf.errors import ConfigurationError
from feshrf.tools.regex import RANGE


def make_list(element: Any, keep_none: bool = False) -> List:
    """Turns element into a list of itself if it is not a list or tuple."""

    if element is None and not keep_none:
        element = []  # Convert none to empty list
    if not isinstance(element, (list, tuple, set, np.ndarray)):
        element = [element]
    elif isinstance(element, (tuple, set, np.ndarray)):
        element = list(element)

    return element


def parse_range(text: str, flag: str = "--grid") -> np.ndarray:
    """Parse a `start:stop:step` option into an inclusive grid.

    Parameters:
        text:
            The option value.
        flag:
            Name of the option, used in error messages.

    Raises:
        ConfigurationError:
            If the text is malformed, the step is not positive
            or the stop lies below the start.

    Returns:
        Strictly increasing grid from start to stop (stop included when
        it lies on the grid).
    """
    match = RANGE.match(text or "")
    if not match:
        raise ConfigurationError(
            f"{flag} expects 'start:stop:step', got '{text}'."
        )
    start, stop, step = (float(v) for v in match.groups())
    if step <= 0:
        raise ConfigurationError(f"{flag} step must be positive, got {step}.")
    if stop < start:
        raise ConfigurationError(
            f"{flag} stop ({stop}) must not be below start ({start})."
        )
    num = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(num)


def is_strictly_increasing(values: Any) -> bool:
    """Whether a sequence of numbers is strictly increasing."""
    array = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(array) > 0))


def worker_count(threads: Optional[int] = None) -> int:
    """Number of worker threads, all cores when `threads` is None."""
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise ConfigurationError(f"threads must be >= 1, got {threads}.")
    return int(threads)
