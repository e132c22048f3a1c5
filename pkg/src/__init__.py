"""
Weighted Sparsity Regularization

Recovery of interior sources of an elliptic PDE from boundary data using
weighted l1 regularization built from an auxiliary operator B.
"""

__version__ = "0.1.0"
