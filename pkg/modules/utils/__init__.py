"""
modules.utils package for RMTT-Workbench.
"""
