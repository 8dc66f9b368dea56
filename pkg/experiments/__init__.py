"""
Experiment handlers
One module per CLI command, plus the data generator and k-means they share
"""

__all__ = ['datagen', 'clustering', 'table1', 'distance_recovery', 'std_curve', 'verify']
