"""Core 3D geometry: rigid transforms, camera models and pose interpolation.

Conventions used throughout the toolkit:

* Quaternions are scalar-last ``(x, y, z, w)`` and canonicalized to
  ``w >= 0`` so that equal rotations compare equal.
* ``Pose`` stores a camera-to-world transform ``T_wc`` unless a variable
  name says otherwise (``T_cw``, ``T_rel``, ...).
* The push-broom scan line lies along the camera **x** axis and the
  boresight is **+z**; the simulator uses the same convention so the
  pipeline is self-consistent end to end.
* World frames are metric North-East-Down; Down is positive toward the
  seabed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ColumnOutOfRange, NonPositiveDepth, OutOfRange

_QUAT_NORM_TOL = 1e-9


# ---------------------------------------------------------------------------
# quaternion primitives (scalar-last)
# ---------------------------------------------------------------------------

def quat_normalize(q: np.ndarray) -> np.ndarray:
    """Unit-normalize and canonicalize the sign so that w >= 0."""
    q = np.asarray(q, dtype=np.float64)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    q = q / n
    if q[3] < 0.0:
        q = -q
    return q


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a*b for scalar-last quaternions."""
    ax, ay, az, aw = a
    bx, by, bz, bw = b
    return np.array([
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
        aw * bw - ax * bx - ay * by - az * bz,
    ])


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([-q[0], -q[1], -q[2], q[3]])


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit quaternion."""
    x, y, z, w = q
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    return np.array([
        [1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)],
        [2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)],
        [2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)],
    ])


def matrix_to_quat(R: np.ndarray) -> np.ndarray:
    """Unit quaternion of a rotation matrix (Shepperd's method)."""
    R = np.asarray(R, dtype=np.float64)
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    if tr > 0.0:
        s = np.sqrt(tr + 1.0) * 2.0
        w = 0.25 * s
        x = (R[2, 1] - R[1, 2]) / s
        y = (R[0, 2] - R[2, 0]) / s
        z = (R[1, 0] - R[0, 1]) / s
    elif R[0, 0] >= R[1, 1] and R[0, 0] >= R[2, 2]:
        s = np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2]) * 2.0
        w = (R[2, 1] - R[1, 2]) / s
        x = 0.25 * s
        y = (R[0, 1] + R[1, 0]) / s
        z = (R[0, 2] + R[2, 0]) / s
    elif R[1, 1] >= R[2, 2]:
        s = np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2]) * 2.0
        w = (R[0, 2] - R[2, 0]) / s
        x = (R[0, 1] + R[1, 0]) / s
        y = 0.25 * s
        z = (R[1, 2] + R[2, 1]) / s
    else:
        s = np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1]) * 2.0
        w = (R[1, 0] - R[0, 1]) / s
        x = (R[0, 2] + R[2, 0]) / s
        y = (R[1, 2] + R[2, 1]) / s
        z = 0.25 * s
    return quat_normalize(np.array([x, y, z, w]))


def quat_from_rotvec(v: np.ndarray) -> np.ndarray:
    """Exponential map: rotation vector (axis*angle, radians) -> quaternion."""
    v = np.asarray(v, dtype=np.float64)
    angle = np.linalg.norm(v)
    if angle < 1e-12:
        # first-order expansion keeps the map smooth through zero
        q = np.array([0.5 * v[0], 0.5 * v[1], 0.5 * v[2], 1.0])
        return quat_normalize(q)
    axis = v / angle
    s = np.sin(0.5 * angle)
    return quat_normalize(np.array([axis[0] * s, axis[1] * s, axis[2] * s,
                                    np.cos(0.5 * angle)]))


def quat_to_rotvec(q: np.ndarray) -> np.ndarray:
    """Logarithm map: quaternion -> rotation vector (radians)."""
    q = quat_normalize(q)
    sin_half = np.linalg.norm(q[:3])
    if sin_half < 1e-12:
        return 2.0 * q[:3]
    angle = 2.0 * np.arctan2(sin_half, q[3])
    return q[:3] * (angle / sin_half)


def quat_slerp(qa: np.ndarray, qb: np.ndarray, alpha: float) -> np.ndarray:
    """Shortest-arc spherical interpolation between unit quaternions."""
    qa = np.asarray(qa, dtype=np.float64)
    qb = np.asarray(qb, dtype=np.float64)
    dot = float(np.dot(qa, qb))
    if dot < 0.0:           # double cover: take the short way around
        qb = -qb
        dot = -dot
    if dot > 1.0 - 1e-10:   # nearly parallel: nlerp is exact enough
        return quat_normalize(qa + alpha * (qb - qa))
    theta = np.arccos(min(dot, 1.0))
    st = np.sin(theta)
    wa = np.sin((1.0 - alpha) * theta) / st
    wb = np.sin(alpha * theta) / st
    return quat_normalize(wa * qa + wb * qb)


def quat_angle(qa: np.ndarray, qb: np.ndarray) -> float:
    """Rotation angle (radians) between two unit quaternions."""
    dot = abs(float(np.dot(quat_normalize(qa), quat_normalize(qb))))
    return 2.0 * np.arccos(min(dot, 1.0))


# ---------------------------------------------------------------------------
# Pose
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pose:
    """SE(3) rigid transform: unit quaternion (x, y, z, w) + translation (m).

    Immutable; every constructor and composition renormalizes the
    quaternion (norm within 1e-9 of 1) and canonicalizes w >= 0.
    """

    q: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.0, 1.0]))
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "q", quat_normalize(self.q))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=np.float64).reshape(3).copy())

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    @staticmethod
    def from_matrix(M: np.ndarray) -> "Pose":
        M = np.asarray(M, dtype=np.float64)
        return Pose(matrix_to_quat(M[:3, :3]), M[:3, 3])

    @staticmethod
    def from_rotation_translation(R: np.ndarray, t: np.ndarray) -> "Pose":
        return Pose(matrix_to_quat(R), t)

    @staticmethod
    def from_rotvec(rotvec: np.ndarray, t=(0.0, 0.0, 0.0)) -> "Pose":
        return Pose(quat_from_rotvec(np.asarray(rotvec, dtype=np.float64)), t)

    # -- views --------------------------------------------------------------

    @property
    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.q)

    def matrix(self) -> np.ndarray:
        M = np.eye(4)
        M[:3, :3] = self.rotation_matrix
        M[:3, 3] = self.t
        return M

    # -- group operations ----------------------------------------------------

    def inverse(self) -> "Pose":
        qi = quat_conjugate(self.q)
        return Pose(qi, -(quat_to_matrix(qi) @ self.t))

    def __matmul__(self, other: "Pose") -> "Pose":
        return compose(self, other)


def compose(a: Pose, b: Pose) -> Pose:
    """Composite transform applying ``b`` first, then ``a``."""
    return Pose(quat_multiply(a.q, b.q), a.t + a.rotation_matrix @ b.t)


def apply(T: Pose, p: np.ndarray) -> np.ndarray:
    """Rigid action R @ p + t; accepts a single point (3,) or a batch (N, 3)."""
    p = np.asarray(p, dtype=np.float64)
    R = T.rotation_matrix
    if p.ndim == 1:
        return R @ p + T.t
    return p @ R.T + T.t


# ---------------------------------------------------------------------------
# camera models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PinholeIntrinsics:
    """Calibrated pinhole camera with Brown-Conrady radial-tangential distortion."""

    fx: float
    fy: float
    cx: float
    cy: float
    k1: float = 0.0
    k2: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    width: int = 0
    height: int = 0

    def __post_init__(self):
        if self.fx <= 0.0 or self.fy <= 0.0:
            raise ValueError("focal lengths must be positive")
        if self.width and not (0.0 <= self.cx < self.width):
            raise ValueError("cx outside sensor")
        if self.height and not (0.0 <= self.cy < self.height):
            raise ValueError("cy outside sensor")


@dataclass(frozen=True)
class PushBroomIntrinsics:
    """Single-line scanner: one spatial row of ``width`` pixels, B spectral bands."""

    f: float
    c: float
    width: int
    band_count: int = 1

    def __post_init__(self):
        if self.f <= 0.0:
            raise ValueError("focal length must be positive")
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if not (0.0 <= self.c < self.width):
            raise ValueError("principal offset outside line")
        if self.band_count < 1:
            raise ValueError("band_count must be >= 1")


def distort_normalized(K: PinholeIntrinsics, x: np.ndarray, y: np.ndarray):
    """Brown-Conrady forward distortion on normalized coordinates."""
    r2 = x * x + y * y
    radial = 1.0 + K.k1 * r2 + K.k2 * r2 * r2
    xd = x * radial + 2.0 * K.p1 * x * y + K.p2 * (r2 + 2.0 * x * x)
    yd = y * radial + K.p1 * (r2 + 2.0 * y * y) + 2.0 * K.p2 * x * y
    return xd, yd


def project_pinhole(K: PinholeIntrinsics, p_cam: np.ndarray) -> np.ndarray:
    """Project camera-frame point(s) to (possibly off-sensor) pixel coordinates.

    Raises NonPositiveDepth if any depth is <= 1e-12; bounds are the
    caller's concern.
    """
    p = np.asarray(p_cam, dtype=np.float64)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    z = p[:, 2]
    if np.any(z <= 1e-12):
        raise NonPositiveDepth(f"{int(np.sum(z <= 1e-12))} point(s) at non-positive depth")
    x = p[:, 0] / z
    y = p[:, 1] / z
    xd, yd = distort_normalized(K, x, y)
    uv = np.column_stack([K.fx * xd + K.cx, K.fy * yd + K.cy])
    return uv[0] if single else uv


def back_project_pinhole(K: PinholeIntrinsics, uv: np.ndarray,
                         iterations: int = 8) -> np.ndarray:
    """Unit-depth back-projection, undistorting by fixed-point iteration.

    Exact for zero distortion; for mild distortion the iteration converges
    well below pixel noise.
    """
    uv = np.asarray(uv, dtype=np.float64)
    single = uv.ndim == 1
    uv = np.atleast_2d(uv)
    xd = (uv[:, 0] - K.cx) / K.fx
    yd = (uv[:, 1] - K.cy) / K.fy
    x, y = xd.copy(), yd.copy()
    for _ in range(iterations):
        xt, yt = distort_normalized(K, x, y)
        x = x - (xt - xd)
        y = y - (yt - yd)
    p = np.column_stack([x, y, np.ones_like(x)])
    return p[0] if single else p


def pushbroom_ray(L: PushBroomIntrinsics, u) -> np.ndarray:
    """Unit viewing ray of column ``u`` in the camera frame.

    The scan line lies along camera x, boresight +z:
    normalize(((u - c)/f, 0, 1)). Accepts a scalar or an array of columns.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr < 0) or np.any(u_arr >= L.width):
        raise ColumnOutOfRange(f"column(s) outside [0, {L.width})")
    x = (u_arr - L.c) / L.f
    d = np.stack([x, np.zeros_like(x), np.ones_like(x)], axis=-1)
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def pushbroom_rays(L: PushBroomIntrinsics) -> np.ndarray:
    """Rays for every column, shape (width, 3)."""
    return pushbroom_ray(L, np.arange(L.width))


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimedPose:
    t: float
    pose: Pose


class Trajectory:
    """Time-sorted pose samples with lerp/slerp interpolation.

    Stored internally as arrays (times, scalar-last quaternions,
    translations); immutable after construction.
    """

    def __init__(self, times: np.ndarray, quats: np.ndarray, trans: np.ndarray):
        times = np.asarray(times, dtype=np.float64)
        quats = np.asarray(quats, dtype=np.float64)
        trans = np.asarray(trans, dtype=np.float64)
        if times.ndim != 1 or len(times) == 0:
            raise ValueError("trajectory needs at least one sample")
        if not np.all(np.isfinite(times)):
            raise ValueError("non-finite timestamp")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("timestamps must be strictly increasing")
        if quats.shape != (len(times), 4) or trans.shape != (len(times), 3):
            raise ValueError("inconsistent sample arrays")
        norms = np.linalg.norm(quats, axis=1)
        quats = quats / norms[:, None]
        flip = quats[:, 3] < 0.0
        quats[flip] = -quats[flip]
        self.times = times
        self.quats = quats
        self.trans = trans

    @staticmethod
    def from_samples(samples: list[TimedPose]) -> "Trajectory":
        samples = sorted(samples, key=lambda s: s.t)
        return Trajectory(
            np.array([s.t for s in samples]),
            np.array([s.pose.q for s in samples]),
            np.array([s.pose.t for s in samples]),
        )

    def __len__(self) -> int:
        return len(self.times)

    @property
    def t_min(self) -> float:
        return float(self.times[0])

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def sample(self, i: int) -> TimedPose:
        return TimedPose(float(self.times[i]), Pose(self.quats[i], self.trans[i]))


def interpolate_pose(traj: Trajectory, t: float) -> Pose:
    """Pose at time ``t``: slerp on rotation, lerp on translation.

    Exact sample poses are returned at sample timestamps. Raises
    OutOfRange outside the span; callers drop such queries by default.
    """
    if len(traj) < 2:
        raise ValueError("interpolation needs at least two samples")
    if t < traj.t_min or t > traj.t_max:
        raise OutOfRange(f"t={t} outside [{traj.t_min}, {traj.t_max}]")
    i = int(np.searchsorted(traj.times, t))
    if i < len(traj) and traj.times[i] == t:
        return Pose(traj.quats[i], traj.trans[i])
    lo, hi = i - 1, i
    alpha = (t - traj.times[lo]) / (traj.times[hi] - traj.times[lo])
    q = quat_slerp(traj.quats[lo], traj.quats[hi], alpha)
    tr = (1.0 - alpha) * traj.trans[lo] + alpha * traj.trans[hi]
    return Pose(q, tr)


def interpolate_poses(traj: Trajectory, ts: np.ndarray):
    """Vectorized interpolation for many timestamps.

    Returns (quats (N,4), trans (N,3), in_range (N,) bool); out-of-span
    entries are flagged instead of raising so bulk consumers can drop
    and count them.
    """
    ts = np.asarray(ts, dtype=np.float64)
    in_range = (ts >= traj.t_min) & (ts <= traj.t_max)
    idx = np.clip(np.searchsorted(traj.times, ts, side="right") - 1, 0, len(traj) - 2)
    t0 = traj.times[idx]
    t1 = traj.times[idx + 1]
    alpha = np.clip((ts - t0) / (t1 - t0), 0.0, 1.0)

    qa = traj.quats[idx]
    qb = traj.quats[idx + 1]
    dot = np.sum(qa * qb, axis=1)
    qb = np.where(dot[:, None] < 0.0, -qb, qb)
    dot = np.abs(dot)

    theta = np.arccos(np.clip(dot, -1.0, 1.0))
    st = np.sin(theta)
    near = dot > 1.0 - 1e-10
    with np.errstate(invalid="ignore", divide="ignore"):
        wa = np.where(near, 1.0 - alpha, np.sin((1.0 - alpha) * theta) / st)
        wb = np.where(near, alpha, np.sin(alpha * theta) / st)
    q = wa[:, None] * qa + wb[:, None] * qb
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    flip = q[:, 3] < 0.0
    q[flip] = -q[flip]

    tr = (1.0 - alpha)[:, None] * traj.trans[idx] + alpha[:, None] * traj.trans[idx + 1]
    return q, tr, in_range
