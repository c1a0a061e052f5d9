"""finhom: exact homological algebra at finitely presented scale.

The library stack, bottom up:

* ``rings`` / ``matrix`` / ``smith`` -- exact linear algebra over Z, Z/n, F_p
* ``modules`` / ``functors``         -- finitely presented modules, Ext, Tor,
  projective/flat/injective tests, the explicit vanishing-Ext lift
* ``complexes``                      -- bounded chain complexes, homology,
  spheres/disks, tensor products, null-homotopy, pushouts/pullbacks
* ``cotorsion``                      -- object classes, cotorsion-pair data,
  induced complex classes and compatibility checks
* ``kaplansky``                      -- small surjecting subobjects, witness
  subobjects, filtrations, subcomplex envelopes, cell decompositions
* ``model``                          -- model-structure specs, classification,
  factorization, lifting, replacements, derived tensor
* ``checks``                         -- executable model/monoidal axiom suites
* ``quiver``                         -- quasi-coherent modules over ring-valued
  quiver representations
* ``workspace`` / ``report`` / ``cli`` -- the text input format, deterministic
  reports and the command-line surface
"""

from .complexes import (
    ChainComplex,
    ChainMap,
    disk,
    homology,
    is_exact,
    sphere,
    tensor_complexes,
)
from .functors import ext_n, free_resolution, is_flat, is_injective, is_projective, tensor_modules, tor_n
from .matrix import Matrix
from .modules import FpModule, ModuleMap, ShortExactSeq
from .rings import Integers, IntegersModN, PrimeField, Ring
from .smith import SmithForm, kernel_basis, snf, solve_linear

__all__ = [
    "Integers",
    "IntegersModN",
    "PrimeField",
    "Ring",
    "Matrix",
    "SmithForm",
    "snf",
    "solve_linear",
    "kernel_basis",
    "FpModule",
    "ModuleMap",
    "ShortExactSeq",
    "free_resolution",
    "ext_n",
    "tor_n",
    "tensor_modules",
    "is_projective",
    "is_flat",
    "is_injective",
    "ChainComplex",
    "ChainMap",
    "sphere",
    "disk",
    "homology",
    "is_exact",
    "tensor_complexes",
]
