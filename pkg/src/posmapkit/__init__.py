"""Toolkit for UV position-map based 3D face reconstruction and dense alignment.

Submodules:
    mesh        triangle-mesh / point-cloud types and text IO
    uvparam     Tutte embedding of disk-topology meshes into the unit square
    posmap      position-map baking, unbaking, landmark lookup, UVPM files
    maskloss    region weight masks and the weighted regression loss
    augment     ground-truth-consistent 2D augmentation
    autodiff    minimal reverse-mode tensor engine
    network     encoder-decoder position-map regressor
    training    Adam training loop
    evaluation  NME / CED / ICP / reconstruction-error protocols
    datastore   synthetic dataset generation, storage and splits
    cli         command-line entry points
"""

__version__ = "0.1.0"
