"""
modules package for RMTT-Workbench.
"""
