"""Tabu search for the static dial-a-ride problem.

Modules: ``model`` and ``instance_io`` for data, ``schedule`` and ``kernels``
for route evaluation, ``timewindow`` and ``construction`` for preprocessing
and start solutions, ``neighborhood`` and ``tabu`` for the search, ``oracle``
for exact checks on tiny inputs, ``bench`` and ``cli`` for experiments, and
``instgen`` for synthetic instances.
"""

__version__ = "0.1.0"
