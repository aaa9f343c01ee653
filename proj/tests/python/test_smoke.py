#
# Copyright 2026 The rscam Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Smoke tests for the Python bindings."""

import math

import numpy as np
import pytest

import rscam


def unit_camera():
    return rscam.CameraIntrinsics(np.eye(3), 1, 1)


def test_fronto_parallel_example():
    # Camera translating at 0.5 m/s along y, scan rate 10 rows/s.
    motion = rscam.MotionState(v=[0.0, 0.5, 0.0])
    shutter = rscam.ShutterParams(scan_rate=10.0, framerate=10.0)
    p = rscam.project_rolling_shutter([0.0, 0.1, 1.0], motion, unit_camera(),
                                      shutter)
    assert p.scan_time == pytest.approx(0.1 / 9.5, rel=1e-12)
    assert p.pixel[1] == pytest.approx(0.1 + 0.5 * 0.1 / 9.5, rel=1e-12)
    assert p.method == "fronto_parallel_linear"


def test_static_camera_is_perspective():
    K = rscam.CameraIntrinsics.from_fov(640, 480, 40.0)
    motion = rscam.MotionState(T=[0.1, -0.2, 0.0])
    shutter = rscam.ShutterParams.for_framerate(15.0, 480)
    X = np.array([0.3, -0.4, 6.0])
    rs = rscam.project_rolling_shutter(X, motion, K, shutter)
    np.testing.assert_allclose(rs.pixel, rscam.project_perspective(X, motion, K),
                               atol=1e-12)


def test_rotation_round_trip():
    w = np.array([0.2, -0.5, 0.9])
    np.testing.assert_allclose(rscam.rotation_log(rscam.rotation_exp(w)), w,
                               atol=1e-12)


def test_flow_matches_finite_difference():
    K = rscam.CameraIntrinsics.from_fov(640, 480, 40.0)
    shutter = rscam.ShutterParams.for_framerate(15.0, 480)
    shutter.first_row = -K.K[1, 2]
    motion = rscam.MotionState(v=[1.0, 2.0, 0.0], w=[0.0, 0.0, 0.5])
    analytic = rscam.flow_rolling_shutter(0.05, 0.1, 5.0, motion, K, shutter)
    fd = rscam.flow_finite_difference(0.05, 0.1, 5.0, motion, K, shutter, 1e-4)
    np.testing.assert_allclose(analytic, fd, atol=1e-6)


def test_limit_line_and_slits():
    K = rscam.CameraIntrinsics.from_fov(640, 480, 40.0)
    shutter = rscam.ShutterParams.for_framerate(7.5, 480)
    z = rscam.limit_line(shutter, K, 2.0)
    assert z == pytest.approx(2.0 * K.K[1, 1] / 7.5, rel=1e-12)
    motion = rscam.MotionState(v=[0.5, 2.0, 0.0])
    (p1, d1), (p2, d2) = rscam.compute_slits(motion, K, shutter)
    p, d = rscam.backproject([0.1, -0.05], motion, K, shutter)
    assert rscam.line_line_distance(p, d, p1, d1) < 1e-9
    assert rscam.line_line_distance(p, d, p2, d2) < 1e-9


def test_calibration_within_one_bin():
    img = rscam.synthesize_led_image(7.5, 240, 32, 40.0, exposure_gradient=True)
    assert img.shape == (240, 32)
    spr, half_bin = rscam.estimate_seconds_per_row(img, 7.5, 40.0)
    assert abs(spr - rscam.ideal_seconds_per_row(7.5, 240)) <= 2 * half_bin


def test_no_peak_raises():
    with pytest.raises(rscam.NoPeak):
        rscam.estimate_seconds_per_row(np.zeros((240, 32)), 7.5, 40.0)


def test_exception_hierarchy():
    assert issubclass(rscam.NegativeDepth, rscam.DepthError)
    assert issubclass(rscam.NoScanTime, rscam.RscamError)
    motion = rscam.MotionState()
    shutter = rscam.ShutterParams(scan_rate=10.0)
    with pytest.raises(rscam.DepthError):
        rscam.project_rolling_shutter([0.0, 0.0, -1.0], motion, unit_camera(),
                                      shutter)


def test_sfm_trial_noiseless_recovers_pose():
    result = rscam.sfm_trial(7.5, 0.0, seed=2)
    assert result["rotation_error_deg"] < 1e-4
    assert result["reprojection_rms"] < 1e-6
    assert math.isfinite(result["translation_error_deg"])
