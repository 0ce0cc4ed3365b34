"""
overflow_core: cost-aware variable-length source coding and overflow-probability verification
"""
__version__ = "0.1.0"
