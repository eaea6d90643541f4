"""Swimmer shape definitions.

All supported surfaces are star-shaped and described in spherical
coordinates by a radius function ``r(theta, phi) > 0``:

* ``radial`` shapes built from spherical-harmonic terms,
  ``r = base + Re(sum c Y_l^m)`` (additive) or
  ``r = base * exp(Re(sum c Y_l^m))`` (exponential);
* ``radial`` shapes given by an explicit ``expression`` in ``theta``/``phi``
  (differentiated symbolically), for profiles that are not finite harmonic
  series;
* ``spheroid``/ellipsoid shapes with semi-axes (a, b, c).
"""

import hashlib
import json
from dataclasses import dataclass

import numpy as np
import yaml
from scipy.special import sph_harm_y


class ShapeError(ValueError):
    """Invalid shape specification (e.g. non-positive radius)."""


@dataclass(frozen=True)
class ShapeSpec:
    kind: str = "radial"
    base_radius: float = 1.0
    terms: tuple = ()  # ((l, m, c_re, c_im), ...)
    composition: str = "additive"  # additive | exponential
    semi_axes: tuple = ()
    expression: str = ""

    def __post_init__(self):
        if self.kind not in ("radial", "spheroid"):
            raise ShapeError(f"unknown shape kind {self.kind!r}")
        if self.kind == "spheroid":
            if len(self.semi_axes) != 3 or min(self.semi_axes) <= 0:
                raise ShapeError("spheroid requires three positive semi-axes")
        elif self.composition not in ("additive", "exponential"):
            raise ShapeError(f"unknown composition {self.composition!r}")
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))
        object.__setattr__(self, "semi_axes", tuple(float(a) for a in self.semi_axes))
        self._check_positive()

    # -- radius evaluation ------------------------------------------------

    def radius(self, theta, phi):
        """Radius and its theta/phi derivatives at the given angles."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if self.kind == "spheroid":
            return self._spheroid_radius(theta, phi)
        if self.expression:
            return self._expression_radius(theta, phi)
        return self._harmonic_radius(theta, phi)

    def _harmonic_radius(self, theta, phi):
        shp = theta.shape
        th, ph = theta.ravel(), phi.ravel()
        f = np.zeros(th.size)
        ft = np.zeros(th.size)
        fp = np.zeros(th.size)
        for (l, m, cre, cim) in self.terms:
            c = complex(cre, cim)
            Y, grad = sph_harm_y(int(l), int(m), th, ph, diff_n=1)
            dYt, dYp = grad[..., 0], grad[..., 1]
            f += (c * Y).real
            ft += (c * dYt).real
            fp += (c * dYp).real
        if self.composition == "exponential":
            r = self.base_radius * np.exp(f)
            return r.reshape(shp), (r * ft).reshape(shp), (r * fp).reshape(shp)
        r = self.base_radius + f
        return r.reshape(shp), ft.reshape(shp), fp.reshape(shp)

    def _spheroid_radius(self, theta, phi):
        a, b, c = self.semi_axes
        st, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        q = (st * cp / a) ** 2 + (st * sp / b) ** 2 + (ct / c) ** 2
        qt = 2.0 * st * ct * (cp**2 / a**2 + sp**2 / b**2 - 1.0 / c**2)
        qp = st**2 * 2.0 * sp * cp * (1.0 / b**2 - 1.0 / a**2)
        r = q ** (-0.5)
        fac = -0.5 * q ** (-1.5)
        return r, fac * qt, fac * qp

    def _expression_radius(self, theta, phi):
        f, ft, fp = _compiled_expression(self.expression)
        shp = theta.shape
        th, ph = theta.ravel(), phi.ravel()
        one = np.ones_like(th)
        return (
            (f(th, ph) * one).reshape(shp),
            (ft(th, ph) * one).reshape(shp),
            (fp(th, ph) * one).reshape(shp),
        )

    def _check_positive(self, n=64):
        theta = np.linspace(1e-3, np.pi - 1e-3, n)
        phi = np.linspace(0.0, 2.0 * np.pi, 2 * n, endpoint=False)
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        r, _, _ = self.radius(tt, pp)
        if not np.all(np.isfinite(r)) or np.min(r) <= 0.0:
            raise ShapeError("shape radius must be positive everywhere")

    # -- (de)serialization ------------------------------------------------

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "spheroid":
            d["semi_axes"] = list(self.semi_axes)
        else:
            d["base_radius"] = self.base_radius
            d["composition"] = self.composition
            if self.expression:
                d["expression"] = self.expression
            if self.terms:
                d["terms"] = [
                    {"l": int(l), "m": int(m), "c_re": cre, "c_im": cim}
                    for (l, m, cre, cim) in self.terms
                ]
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind", "radial")
        if kind == "spheroid":
            return cls(kind="spheroid", semi_axes=tuple(d["semi_axes"]))
        terms = tuple(
            (int(t["l"]), int(t["m"]), float(t.get("c_re", t.get("c", 0.0))),
             float(t.get("c_im", 0.0)))
            for t in d.get("terms", [])
        )
        return cls(
            kind="radial",
            base_radius=float(d.get("base_radius", 1.0)),
            terms=terms,
            composition=d.get("composition", "additive"),
            expression=d.get("expression", ""),
        )

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise ShapeError(f"malformed shape config {path}")
        return cls.from_dict(data)

    def content_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_EXPR_CACHE = {}


def _compiled_expression(expr):
    if expr not in _EXPR_CACHE:
        import sympy as sp

        theta, phi = sp.symbols("theta phi")
        tree = sp.sympify(expr, locals={"theta": theta, "phi": phi})
        funcs = tuple(
            sp.lambdify((theta, phi), g, modules="numpy")
            for g in (tree, sp.diff(tree, theta), sp.diff(tree, phi))
        )
        _EXPR_CACHE[expr] = funcs
    return _EXPR_CACHE[expr]


# Shapes used throughout the validation studies.
def sphere(radius=1.0):
    return ShapeSpec(kind="radial", base_radius=radius)


def wavy_validation_shape():
    """r = 1 + 0.5 Re(Y_4^3), the point-force convergence test body."""
    return ShapeSpec(terms=((4, 3, 0.5, 0.0),))


def tilted_dumbbell():
    """r = 1 + Re(Y_2^1) + 0.1 Re(Y_3^2)."""
    return ShapeSpec(terms=((2, 1, 1.0, 0.0), (3, 2, 0.1, 0.0)))


def chiral_helical_shape():
    """r = exp(0.4 (sin(theta) cos(phi) + sin(theta)^4 cos(theta) sin(phi)))."""
    return ShapeSpec(
        composition="exponential",
        expression="exp(0.4*(sin(theta)*cos(phi)"
        " + sin(theta)**4*cos(theta)*sin(phi)))",
    )
