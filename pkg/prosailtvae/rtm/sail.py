import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import tensorflow as tf

from ..autodiff import safe_where, safe_divide, check_domain
from ..types import CanopyParams, ViewGeometry, SoilBasis
from .prospect import LeafOptics

# class boundaries of the standard 13-class discretization, degrees
_STANDARD_BOUNDS = np.array([0., 10., 20., 30., 40., 50., 60., 70., 80., 82., 84., 86., 88., 90.])
_HOTSPOT_STEPS = 20
_MAX_HOTSPOT_ALPHA = 200.0
_SPHERICAL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class CanopyReflectance:
    """The four 4SAIL reflectance factors, shape [B, W]

    rsot is bidirectional, rdot hemispherical-directional, rsdt directional-hemispherical
    and rddt bi-hemispherical.
    """
    rsot: tf.Tensor
    rdot: tf.Tensor
    rsdt: tf.Tensor
    rddt: tf.Tensor


def soil_spectrum(soil_wet, soil_bright, basis: SoilBasis, start: int = 0, stop: int = None) -> tf.Tensor:
    """Two-parameter soil reflectance, soil_bright * (soil_wet * wet + (1 - soil_wet) * dry)

    The result is clipped to [0, 1], with zero gradient in the clipped region.

    Args:
        soil_wet (tf.Tensor): wetness mixing factor in [0, 1], shape [B].
        soil_bright (tf.Tensor): brightness factor, shape [B].
        basis (SoilBasis): dry and wet basis spectra.
        start (int, optional): first grid index. Defaults to 0.
        stop (int, optional): last grid index, exclusive. Defaults to the end of the grid.

    Returns:
        tf.Tensor: soil reflectance, shape [B, W].
    """
    soil_wet = tf.convert_to_tensor(soil_wet, dtype=tf.dtypes.float64)[..., tf.newaxis]
    soil_bright = tf.convert_to_tensor(soil_bright, dtype=tf.dtypes.float64)[..., tf.newaxis]
    dry = tf.constant(basis.dry.values[start:stop], dtype=tf.dtypes.float64)
    wet = tf.constant(basis.wet.values[start:stop], dtype=tf.dtypes.float64)
    return tf.clip_by_value(soil_bright * (soil_wet * wet + (1.0 - soil_wet) * dry), 0.0, 1.0)


def lidf_classes(n_classes: int = 13) -> Tuple[np.ndarray, np.ndarray]:
    """Class boundaries and centers of the leaf inclination discretization, degrees"""
    if n_classes == 13:
        bounds = _STANDARD_BOUNDS
    else:
        bounds = np.linspace(0.0, 90.0, n_classes + 1)
    return bounds, (bounds[:-1] + bounds[1:]) / 2


def lidf_weights(ala_deg, n_classes: int = 13) -> Tuple[np.ndarray, tf.Tensor]:
    """Campbell ellipsoidal leaf inclination distribution, parameterized by the mean leaf angle

    Args:
        ala_deg (tf.Tensor): mean leaf angle in degrees, in (0, 90), shape [B].
        n_classes (int, optional): number of inclination classes, at least 9. Defaults to 13.

    Raises:
        ValueError: if n_classes < 9.

    Returns:
        Tuple[np.ndarray, tf.Tensor]: class centers [n], and weights [B, n] summing to one.
    """
    if n_classes < 9:
        raise ValueError(f'n_classes must be at least 9, got {n_classes}')
    bounds, centers = lidf_classes(n_classes)
    tl1 = np.deg2rad(bounds[1:])
    tl2 = np.deg2rad(bounds[:-1])

    ala = tf.convert_to_tensor(ala_deg, dtype=tf.dtypes.float64)[..., tf.newaxis]
    excent = tf.math.exp(-1.6184e-5 * ala ** 3 + 2.1145e-3 * ala ** 2 - 1.2390e-1 * ala + 3.2491)

    def ellipse_x(tl):
        # np.tan(pi/2) is finite, x vanishes there as it should
        return excent / tf.math.sqrt(1.0 + excent ** 2 * np.tan(tl) ** 2)

    x1, x2 = ellipse_x(tl1), ellipse_x(tl2)

    def oblate(excent, x1, x2):
        alpha2 = excent ** 2 / (excent ** 2 - 1.0)
        alpx1 = tf.math.sqrt(alpha2 + x1 ** 2)
        alpx2 = tf.math.sqrt(alpha2 + x2 ** 2)
        return tf.math.abs(x1 * alpx1 + alpha2 * tf.math.log(x1 + alpx1)
                           - x2 * alpx2 - alpha2 * tf.math.log(x2 + alpx2))

    def prolate(excent, x1, x2):
        alpha2 = excent ** 2 / (1.0 - excent ** 2)
        alpha = tf.math.sqrt(alpha2)
        almx1 = tf.math.sqrt(tf.maximum(alpha2 - x1 ** 2, 0.0))
        almx2 = tf.math.sqrt(tf.maximum(alpha2 - x2 ** 2, 0.0))
        return tf.math.abs(x1 * almx1 + alpha2 * tf.math.asin(tf.minimum(x1 / alpha, 1.0))
                           - x2 * almx2 - alpha2 * tf.math.asin(tf.minimum(x2 / alpha, 1.0)))

    def spherical(excent, x1, x2):
        return tf.math.abs(np.cos(tl1) - np.cos(tl2)) * tf.ones_like(excent)

    excent_b = tf.broadcast_to(excent, tf.shape(x1))
    is_oblate = excent_b > 1.0 + _SPHERICAL_TOLERANCE
    is_prolate = excent_b < 1.0 - _SPHERICAL_TOLERANCE
    freq = safe_where(is_oblate, oblate,
                      lambda e, a, b: safe_where(is_prolate, prolate, spherical, e, a, b, safe_value=0.5),
                      excent_b, x1, x2, safe_value=2.0)
    return centers, freq / tf.reduce_sum(freq, axis=-1, keepdims=True)


def volume_scattering(tts, tto, psi, ttl):
    """Interception functions and volume scattering weights of one leaf inclination

    Args:
        tts (tf.Tensor): sun zenith, degrees, shape [B, 1].
        tto (tf.Tensor): view zenith, degrees, shape [B, 1].
        psi (tf.Tensor): relative azimuth, degrees, shape [B, 1].
        ttl (np.ndarray): leaf inclinations, degrees, shape [n].

    Returns:
        Tuple[tf.Tensor, ...]: chi_s, chi_o, frho, ftau, each [B, n].
    """
    cos_ts, sin_ts = tf.math.cos(tts * math.pi / 180), tf.math.sin(tts * math.pi / 180)
    cos_to, sin_to = tf.math.cos(tto * math.pi / 180), tf.math.sin(tto * math.pi / 180)
    psir = psi * math.pi / 180
    cos_psi = tf.math.cos(psir)
    cos_tl = tf.constant(np.cos(np.deg2rad(ttl)), dtype=tf.dtypes.float64)
    sin_tl = tf.constant(np.sin(np.deg2rad(ttl)), dtype=tf.dtypes.float64)

    cs, co = cos_tl * cos_ts, cos_tl * cos_to
    ss, so = sin_tl * sin_ts, sin_tl * sin_to

    cos_bts = safe_divide(-cs, tf.where(tf.math.abs(ss) > 1e-6, ss, tf.zeros_like(ss)), 5.0)
    cos_bto = safe_divide(-co, tf.where(tf.math.abs(so) > 1e-6, so, tf.zeros_like(so)), 5.0)

    # transition angles, the whole leaf side is lit or seen when |cos(beta)| >= 1
    lit = tf.math.abs(cos_bts) < 1.0
    bts = tf.where(lit, tf.math.acos(tf.clip_by_value(cos_bts, -1.0, 1.0)), math.pi * tf.ones_like(cs))
    ds = tf.where(lit, ss, cs)
    chi_s = 2.0 / math.pi * ((bts - math.pi * 0.5) * cs + tf.math.sin(bts) * ss)

    seen = tf.math.abs(cos_bto) < 1.0
    bto = tf.where(seen, tf.math.acos(tf.clip_by_value(cos_bto, -1.0, 1.0)),
                   tf.where(tto < 90.0, math.pi * tf.ones_like(co), tf.zeros_like(co)))
    doo = tf.where(seen, so, tf.where(tto < 90.0, co, -co))
    chi_o = 2.0 / math.pi * ((bto - math.pi * 0.5) * co + tf.math.sin(bto) * so)

    btran1 = tf.math.abs(bts - bto)
    btran2 = math.pi - tf.math.abs(bts + bto - math.pi)
    psir = tf.broadcast_to(psir, tf.shape(btran1))
    below1 = psir <= btran1
    below2 = psir <= btran2
    bt1 = tf.where(below1, psir, btran1)
    bt2 = tf.where(below1, btran1, tf.where(below2, psir, btran2))
    bt3 = tf.where(below1, btran2, tf.where(below2, btran2, psir))

    t1 = 2.0 * cs * co + ss * so * cos_psi
    t2 = tf.where(bt2 > 0.0,
                  tf.math.sin(bt2) * (2.0 * ds * doo + ss * so * tf.math.cos(bt1) * tf.math.cos(bt3)),
                  tf.zeros_like(bt2))

    denom = 2.0 * math.pi * math.pi
    frho = tf.maximum(((math.pi - bt2) * t1 + t2) / denom, 0.0)
    ftau = tf.maximum((-bt2 * t1 + t2) / denom, 0.0)
    return chi_s, chi_o, frho, ftau


def _j1(k, m, lai):
    # (exp(-m L) - exp(-k L)) / (k - m), with its series where k ~ m
    d = (k - m) * lai
    near = tf.math.abs(d) <= 1e-3
    general = (tf.math.exp(-m * lai) - tf.math.exp(-k * lai)) / tf.where(near, tf.ones_like(d), k - m)
    limit = 0.5 * lai * (tf.math.exp(-k * lai) + tf.math.exp(-m * lai)) * (1.0 - d * d / 12.0)
    return tf.where(near, limit, general)


def _j2(k, m, lai):
    return (1.0 - tf.math.exp(-(k + m) * lai)) / (k + m)


def _hotspot_integral(ks, ko, lai, alf):
    # exponential Simpson integration of the joint gap probability over 20 steps
    # of equal slope partitioning
    fhot = lai * tf.math.sqrt(ko * ks)
    x1 = tf.zeros_like(alf)
    y1 = tf.zeros_like(alf)
    f1 = tf.ones_like(alf)
    fint = (1.0 - tf.math.exp(-alf)) * 0.05
    total = tf.zeros_like(alf)
    for i in range(_HOTSPOT_STEPS):
        if i < _HOTSPOT_STEPS - 1:
            x2 = -tf.math.log(1.0 - (i + 1) * fint) / alf
        else:
            x2 = tf.ones_like(alf)
        y2 = -(ko + ks) * lai * x2 + fhot * (1.0 - tf.math.exp(-alf * x2)) / alf
        f2 = tf.math.exp(y2)
        total = total + (f2 - f1) * (x2 - x1) / (y2 - y1)
        x1, y1, f1 = x2, y2, f2
    return total, f1


def _canopy_geometry(canopy: CanopyParams, geometry: ViewGeometry, n_classes: int):
    tts = tf.convert_to_tensor(geometry.tts, dtype=tf.dtypes.float64)[:, tf.newaxis]
    tto = tf.convert_to_tensor(geometry.tto, dtype=tf.dtypes.float64)[:, tf.newaxis]
    psi = tf.convert_to_tensor(geometry.psi, dtype=tf.dtypes.float64)[:, tf.newaxis]
    cts, cto = tf.math.cos(tts * math.pi / 180), tf.math.cos(tto * math.pi / 180)

    centers, lidf = lidf_weights(canopy.ala, n_classes)
    chi_s, chi_o, frho, ftau = volume_scattering(tts, tto, psi, centers)
    ctl2 = np.cos(np.deg2rad(centers)) ** 2

    ks = tf.reduce_sum(lidf * chi_s / cts, axis=-1)
    ko = tf.reduce_sum(lidf * chi_o / cto, axis=-1)
    bf = tf.reduce_sum(lidf * ctl2, axis=-1)
    sob = tf.reduce_sum(lidf * frho * math.pi / (cts * cto), axis=-1)
    sof = tf.reduce_sum(lidf * ftau * math.pi / (cts * cto), axis=-1)

    tan_ts, tan_to = tf.math.tan(tts * math.pi / 180), tf.math.tan(tto * math.pi / 180)
    dso = tf.math.sqrt(tf.maximum(tan_ts ** 2 + tan_to ** 2 - 2.0 * tan_ts * tan_to * tf.math.cos(psi * math.pi / 180), 0.0))
    return ks, ko, bf, sob, sof, dso[:, 0]


def canopy_reflectance_factors(leaf: LeafOptics, canopy: CanopyParams, geometry: ViewGeometry,
                               soil: tf.Tensor, n_classes: int = 13) -> CanopyReflectance:
    """4SAIL four-stream canopy reflectance with hotspot correction

    Args:
        leaf (LeafOptics): leaf reflectance and transmittance, [B, W].
        canopy (CanopyParams): canopy parameters, each [B].
        geometry (ViewGeometry): sun-view geometry, each [B], degrees.
        soil (tf.Tensor): soil reflectance, [B, W].
        n_classes (int, optional): leaf inclination classes. Defaults to 13.

    Raises:
        DomainError: if LAI < 0.

    Returns:
        CanopyReflectance: the four reflectance factors. For LAI = 0 all equal the soil.
    """
    lai = tf.convert_to_tensor(canopy.lai, dtype=tf.dtypes.float64)
    hotspot = tf.convert_to_tensor(canopy.hotspot, dtype=tf.dtypes.float64)
    check_domain(lai >= 0.0, 'LAI must be non-negative')
    soil = tf.convert_to_tensor(soil, dtype=tf.dtypes.float64)
    rho, tau = leaf.reflectance, leaf.transmittance

    ks, ko, bf, sob, sof, dso = _canopy_geometry(canopy, geometry, n_classes)

    # hotspot parameter, zero is the pure hotspot without shadow
    has_canopy = lai > 0.0
    lai = tf.where(has_canopy, lai, tf.ones_like(lai))
    alf = tf.minimum(safe_divide(dso, hotspot, 1e6) * 2.0 / (ks + ko), _MAX_HOTSPOT_ALPHA)
    outside_hotspot = alf > 0.0
    sumint, tsstoo = _hotspot_integral(ks, ko, lai, tf.where(outside_hotspot, alf, tf.ones_like(alf)))
    tss_b = tf.math.exp(-ks * lai)
    sumint = tf.where(outside_hotspot, sumint, (1.0 - tss_b) / (ks * lai))
    tsstoo = tf.where(outside_hotspot, tsstoo, tss_b)

    ks, ko, bf, sob, sof, lai, sumint, tsstoo = \
        (x[:, tf.newaxis] for x in (ks, ko, bf, sob, sof, lai, sumint, tsstoo))

    sdb, sdf = 0.5 * (ks + bf), 0.5 * (ks - bf)
    dob, dof = 0.5 * (ko + bf), 0.5 * (ko - bf)
    ddb, ddf = 0.5 * (1.0 + bf), 0.5 * (1.0 - bf)

    sigb = ddb * rho + ddf * tau
    sigf = ddf * rho + ddb * tau
    att = 1.0 - sigf
    m = tf.math.sqrt(tf.maximum((att + sigb) * (att - sigb), 0.0))
    sb, sf = sdb * rho + sdf * tau, sdf * rho + sdb * tau
    vb, vf = dob * rho + dof * tau, dof * rho + dob * tau
    w = sob * rho + sof * tau

    e1 = tf.math.exp(-m * lai)
    e2 = e1 * e1
    rinf = (att - m) / sigb
    rinf2 = rinf * rinf
    re = rinf * e1
    denom = 1.0 - rinf2 * e2

    j1ks, j2ks = _j1(ks, m, lai), _j2(ks, m, lai)
    j1ko, j2ko = _j1(ko, m, lai), _j2(ko, m, lai)
    ps, qs = (sf + sb * rinf) * j1ks, (sf * rinf + sb) * j2ks
    pv, qv = (vf + vb * rinf) * j1ko, (vf * rinf + vb) * j2ko

    rdd = rinf * (1.0 - e2) / denom
    tdd = (1.0 - rinf2) * e1 / denom
    tsd = (ps - re * qs) / denom
    rsd = (qs - re * ps) / denom
    tdo = (pv - re * qv) / denom
    rdo = (qv - re * pv) / denom

    tss = tf.math.exp(-ks * lai)
    too = tf.math.exp(-ko * lai)
    z = _j2(ks, ko, lai)
    g1 = (z - j1ks * too) / (ko + m)
    g2 = (z - j1ko * tss) / (ks + m)
    t1 = (vf * rinf + vb) * g1 * (sf + sb * rinf)
    t2 = (vf + vb * rinf) * g2 * (sf * rinf + sb)
    t3 = (rdo * qs + tdo * ps) * rinf

    # multiple and single scattering
    rsod = (t1 + t2 - t3) / (1.0 - rinf2)
    rsos = w * lai * sumint

    # interaction with the soil
    dn = 1.0 - soil * rdd
    rddt = rdd + tdd * soil * tdd / dn
    rsdt = rsd + (tsd + tss) * soil * tdd / dn
    rdot = rdo + tdd * soil * (tdo + too) / dn
    rsodt = rsod + ((tss + tsd) * tdo + (tsd + tss * soil * rdd) * too) * soil / dn
    rsost = rsos + tsstoo * soil
    rsot = rsost + rsodt

    bare = tf.logical_not(has_canopy)[:, tf.newaxis]
    return CanopyReflectance(*(tf.where(bare, soil, x) for x in (rsot, rdot, rsdt, rddt)))


def sail4(leaf: LeafOptics, canopy: CanopyParams, geometry: ViewGeometry, soil: tf.Tensor,
          n_classes: int = 13) -> tf.Tensor:
    """Top-of-canopy bidirectional reflectance factor, [B, W]

    See `canopy_reflectance_factors` for the arguments.
    """
    return canopy_reflectance_factors(leaf, canopy, geometry, soil, n_classes).rsot
