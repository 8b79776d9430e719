from ._version import __version__, __version_info__
from . import (tools, mesh, field, sparse, fvm, thermo, chemistry, surrogate,
               piso, driver)
__all__ = ['tools', 'mesh', 'field', 'sparse', 'fvm', 'thermo', 'chemistry',
           'surrogate', 'piso', 'driver']
