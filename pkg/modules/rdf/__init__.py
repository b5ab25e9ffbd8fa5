"""
modules.rdf package for RMTT-Workbench.
"""
