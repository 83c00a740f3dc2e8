#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

from __future__ import annotations

import sys
from typing import List, Optional

from loguru import logger

FORMAT = "[{time:YYYY-MM-DD HH:mm:ss}][{module:<15}] | {message}"

_HANDLERS: List[int] = []


def setup_logger(
    level: str = "WARNING", logfile: Optional[str] = None
) -> None:
    """(Re)configure the sinks owned by feshrf.

    Parameters:
        level:
            Level of the stderr sink.
        logfile:
            If given, a DEBUG file sink is added.
            'w' mode cleans the file before writing to it.
    """
    while _HANDLERS:
        logger.remove(_HANDLERS.pop())
    _HANDLERS.append(
        logger.add(sys.stderr, format=FORMAT, level=level, colorize=True)
    )
    if logfile is not None:
        _HANDLERS.append(
            logger.add(logfile, format=FORMAT, level="DEBUG", mode="w")
        )


try:
    logger.remove(0)
except ValueError:
    pass
setup_logger()
