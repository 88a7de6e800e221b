"""nbrefute: sound spectral refutation certificates for random k-XOR and CSP
instances, built on non-backtracking edge operators of weighted graphs.

Submodules:
  linalg          dense kernels, norms, exact brute-force oracles
  nonbacktracking oriented-edge matrix bundle and determinant identity checks
  certify         PSD witnesses and infinity-to-one norm certificates
  instances       k-XOR / CSP instance sampling, evaluation, Fourier transforms
  refute          tensor flattening and the end-to-end refutation pipelines
  walks           walk enumeration, trace identities, canonical-count bounds
  cli             command-line front end (gen / refute / audit / ...)
"""

__version__ = "0.1.0"

__all__ = [
    "linalg",
    "nonbacktracking",
    "certify",
    "instances",
    "refute",
    "walks",
    "cli",
]
