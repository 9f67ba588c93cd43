"""Random-circuit benchmarking of quantum devices, and the pairing game it doubles as."""

import warnings

# numba's TBB probe warns once on old TBB; it falls back to a working layer.
warnings.filterwarnings("ignore", message="The TBB threading layer requires TBB version")

__version__ = "0.1.0"
