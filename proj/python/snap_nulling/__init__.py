"""Speaker-subspace nulling for synthetic speech detection."""

from snap_nulling._snap import *  # noqa: F401,F403
from snap_nulling._snap import SnapError, SpeakerSubspace, __doc__  # noqa: F401

__version__ = "0.1.0"
