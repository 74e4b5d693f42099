#!/usr/bin/env python
"""shim to support editable install"""
from setuptools import setup

setup()
