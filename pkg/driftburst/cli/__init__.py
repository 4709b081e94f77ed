#!/usr/bin/env python3
"""
CLI package

Modules:
    - main: simulate / detect / crit / experiment / fit-db / events / version
"""

__all__ = []
