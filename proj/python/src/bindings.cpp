// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wardsim/arena.hpp"
#include "wardsim/controller.hpp"
#include "wardsim/corpus.hpp"
#include "wardsim/errors.hpp"
#include "wardsim/scenario.hpp"
#include "wardsim/sim.hpp"
#include "wardsim/vehicle.hpp"
#include "wardsim/vision.hpp"

namespace py = pybind11;
using namespace wardsim;

namespace {

template <typename T>
std::string str_of(T v) {
  return std::string(to_string(v));
}

py::array_t<std::uint8_t> to_array(const Frame& f) {
  py::array_t<std::uint8_t> out({f.height, f.width});
  std::copy(f.pixels.begin(), f.pixels.end(), out.mutable_data());
  return out;
}

std::string trace_text(const TraceReport& r) {
  std::ostringstream out;
  write_trace(out, r);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic simulator of line-following ward delivery carts";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("__repr__", [](const Vec2& v) { return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")"; });

  py::class_<Pose>(m, "Pose")
      .def(py::init<double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("heading") = 0.0)
      .def_readwrite("x", &Pose::x)
      .def_readwrite("y", &Pose::y)
      .def_readwrite("heading", &Pose::heading)
      .def("__eq__", [](const Pose& a, const Pose& b) { return a == b; });

  // Arena.
  py::class_<RouteStep>(m, "RouteStep")
      .def_readonly("edge", &RouteStep::edge)
      .def_readonly("start", &RouteStep::from)
      .def_readonly("end", &RouteStep::to)
      .def_readonly("length", &RouteStep::length)
      .def_property_readonly("action", [](const RouteStep& s) { return str_of(s.action); });

  py::class_<TrackMap>(m, "TrackMap")
      .def_property_readonly("pharmacy", [](const TrackMap& t) { return t.pharmacy; })
      .def_property_readonly("ward_ids",
                             [](const TrackMap& t) {
                               std::vector<int> ids;
                               for (const Ward& w : t.wards) ids.push_back(w.id);
                               return ids;
                             })
      .def("distance_to_line", [](const TrackMap& t, double x, double y) { return t.distance_to_line({x, y}); })
      .def("serialize", &serialize_map);

  m.def("default_map", &default_map);
  m.def("load_map", [](const std::string& text) { return load_map(text); });
  m.def("route_to", &route_to, py::arg("map"), py::arg("ward"));
  m.def("plan_length", &plan_length);
  m.def("classify_ward", [](int id) { return str_of(classify_ward(id)); });

  // Vehicle.
  py::class_<VehicleParams>(m, "VehicleParams")
      .def(py::init<>())
      .def_readwrite("track_width", &VehicleParams::track_width)
      .def_readwrite("v_max", &VehicleParams::v_max)
      .def_readwrite("motor_time_constant", &VehicleParams::motor_time_constant)
      .def_readwrite("switch_threshold", &VehicleParams::switch_threshold);

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<>())
      .def_readwrite("pose", &VehicleState::pose)
      .def_property(
          "wheel_speed", [](const VehicleState& s) { return py::make_tuple(s.wheel_speed.left, s.wheel_speed.right); },
          [](VehicleState& s, std::pair<double, double> v) { s.wheel_speed = {v.first, v.second}; })
      .def_readonly("loaded", &VehicleState::loaded)
      .def_readonly("led_red", &VehicleState::led_red)
      .def_readonly("led_yellow", &VehicleState::led_yellow);

  m.def(
      "apply_motor",
      [](const VehicleState& s, double left, double right, double dt, const VehicleParams& p) {
        return apply_motor(s, {left, right}, p, dt);
      },
      py::arg("state"), py::arg("duty_left"), py::arg("duty_right"), py::arg("dt"),
      py::arg("params") = VehicleParams{});

  // Controller.
  py::class_<PidGains>(m, "PidGains")
      .def(py::init<>())
      .def_readwrite("kp", &PidGains::kp)
      .def_readwrite("ki", &PidGains::ki)
      .def_readwrite("kd", &PidGains::kd)
      .def_readwrite("sample_period", &PidGains::sample_period)
      .def_readwrite("integral_limit", &PidGains::integral_limit)
      .def_readwrite("output_limit", &PidGains::output_limit);

  py::class_<PidState>(m, "PidState")
      .def(py::init<>())
      .def_readonly("error_sum", &PidState::error_sum)
      .def_readonly("prev_error", &PidState::prev_error);

  m.def("gains_from_classical", &gains_from_classical, py::arg("kp"), py::arg("ti"), py::arg("td"),
        py::arg("period"), py::arg("integral_limit") = PidGains::unlimited,
        py::arg("output_limit") = PidGains::unlimited);
  m.def("pid_step", &pid_step, py::arg("state"), py::arg("gains"), py::arg("error"));

  // Vision.
  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("width", &CameraModel::width)
      .def_readwrite("height", &CameraModel::height)
      .def_readwrite("pitch", &CameraModel::pitch)
      .def_readwrite("horizontal_fov", &CameraModel::horizontal_fov)
      .def_readwrite("mount_height", &CameraModel::mount_height);

  py::class_<DigitDetection>(m, "DigitDetection")
      .def_readonly("digit", &DigitDetection::digit)
      .def_readonly("image_x", &DigitDetection::image_x)
      .def_readonly("image_y", &DigitDetection::image_y)
      .def_readonly("range_z", &DigitDetection::range_z)
      .def_readonly("score", &DigitDetection::score);

  m.def(
      "render",
      [](const TrackMap& map, const Pose& pose, const CameraModel& cam, double brightness, double sigma, double k1,
         std::uint64_t seed) { return to_array(Renderer(cam, k1).render(map, pose, {brightness, sigma, k1, seed})); },
      py::arg("map"), py::arg("pose"), py::arg("camera") = CameraModel{}, py::arg("brightness") = 0.0,
      py::arg("sigma") = 0.0, py::arg("k1") = 0.0, py::arg("seed") = 0);
  m.def(
      "detect_placards",
      [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> img, const CameraModel& cam) {
        if (img.ndim() != 2) throw std::invalid_argument("expected a 2-D grayscale image");
        Frame f(static_cast<int>(img.shape(1)), static_cast<int>(img.shape(0)));
        std::copy(img.data(), img.data() + img.size(), f.pixels.begin());
        return detect_placards(f, cam, default_templates());
      },
      py::arg("image"), py::arg("camera") = CameraModel{});

  m.def(
      "vision_corpus",
      [](std::vector<double> k1_values, std::vector<double> brightness_values, std::vector<double> sigma_values,
         std::uint64_t seed) {
        CorpusGrid g;
        g.k1_values = std::move(k1_values);
        g.brightness_values = std::move(brightness_values);
        g.sigma_values = std::move(sigma_values);
        g.seed = seed;
        const CorpusReport r = run_vision_corpus(g);
        return py::make_tuple(r.samples.size(), r.accuracy(), r.clean_accuracy());
      },
      py::arg("k1_values") = std::vector<double>{0.0, 0.05, 0.1},
      py::arg("brightness_values") = std::vector<double>{-30.0, 0.0, 30.0},
      py::arg("sigma_values") = std::vector<double>{0.0, 8.0}, py::arg("seed") = 1);

  // Simulation.
  py::class_<CartOutcome>(m, "CartOutcome")
      .def_property_readonly("kind", [](const CartOutcome& o) { return str_of(o.kind); })
      .def_readonly("reason", &CartOutcome::reason)
      .def_readonly("target", &CartOutcome::target)
      .def_readonly("recognized", &CartOutcome::recognized)
      .def_property_readonly("final_phase", [](const CartOutcome& o) { return str_of(o.final_phase); })
      .def_readonly("delivered_tick", &CartOutcome::delivered_tick)
      .def_readonly("done_tick", &CartOutcome::done_tick);

  py::class_<TraceReport>(m, "TraceReport")
      .def_readonly("outcomes", &TraceReport::outcomes)
      .def_readonly("completion_ticks", &TraceReport::completion_ticks)
      .def_readonly("max_line_deviation", &TraceReport::max_line_deviation)
      .def_property_readonly("events",
                             [](const TraceReport& r) {
                               std::vector<std::tuple<std::int64_t, int, std::string>> out;
                               for (const TraceEvent& e : r.events) out.emplace_back(e.tick, e.cart, e.text);
                               return out;
                             })
      .def_property_readonly("poses",
                             [](const TraceReport& r) {
                               py::array_t<double> out({static_cast<py::ssize_t>(r.samples.size()),
                                                        static_cast<py::ssize_t>(5)});
                               auto a = out.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < r.samples.size(); ++i) {
                                 const PoseSample& s = r.samples[i];
                                 a(i, 0) = static_cast<double>(s.tick);
                                 a(i, 1) = s.cart;
                                 a(i, 2) = s.pose.x;
                                 a(i, 3) = s.pose.y;
                                 a(i, 4) = s.pose.heading;
                               }
                               return out;
                             })
      .def("trace", &trace_text);

  m.def(
      "run_ward",
      [](int ward, std::uint64_t seed, double sigma, double brightness, double k1, std::int64_t max_ticks) {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.max_ticks = max_ticks;
        cfg.carts[0].ward = ward;
        cfg.noise = {brightness, sigma, k1, 0};
        cfg.camera.distortion_k1 = k1;
        py::gil_scoped_release unlocked;
        return run_scenario(default_map(), cfg);
      },
      py::arg("ward"), py::arg("seed") = 1, py::arg("sigma") = 0.0, py::arg("brightness") = 0.0, py::arg("k1") = 0.0,
      py::arg("max_ticks") = 6000);
  m.def(
      "run_scenario_file",
      [](const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
        Scenario s = load_scenario_file(path);
        if (seed) s.config.seed = *seed;
        const TrackMap map = resolve_map(s);
        py::gil_scoped_release unlocked;
        return run_scenario(map, s.config);
      },
      py::arg("path"), py::arg("seed") = py::none());
}
