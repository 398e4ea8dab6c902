#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "cdsh/bench.hpp"
#include "cdsh/error.hpp"
#include "cdsh/messages.hpp"
#include "cdsh/sim.hpp"

namespace py = pybind11;
using namespace cdsh;
using namespace cdsh::sim;

namespace {

py::bytes to_py(ByteView b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

Bytes from_py(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

py::object error_or_none(const std::optional<ErrorCode>& e) {
  if (!e) return py::none();
  return py::str(std::string(error_message(*e)));
}

py::dict request_dict(const World& w, const RequestOutcome& r) {
  py::dict d;
  d["recovered"] = r.recovered;
  d["m"] = to_py(r.m);
  d["error"] = error_or_none(r.error);
  d["producer_pid"] =
      r.producer_pid ? py::object(to_py(wire::encode_pseudonym(w.group(), *r.producer_pid))) : py::none();
  return d;
}

py::dict report_dict(const AdversaryReport& r) {
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["trials"] = r.trials;
  d["rejected"] = r.rejected;
  d["false_accepts"] = r.false_accepts;
  d["adversary_recoveries"] = r.adversary_recoveries;
  d["leaks"] = r.leaks;
  d["safe"] = r.safe();
  return d;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  const std::string csv = m.to_csv();
  std::size_t pos = csv.find('\n') + 1;
  while (pos < csv.size()) {
    const std::size_t end = csv.find('\n', pos);
    const std::string line = csv.substr(pos, end - pos);
    const std::size_t comma = line.rfind(',');
    d[py::str(line.substr(0, comma))] = std::stoull(line.substr(comma + 1));
    pos = end + 1;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_cdsh, m) {
  m.doc() = "Cross-domain secure data sharing: protocol simulator and benchmarks";

  py::exception<Error>(m, "CdshError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::module_::import("cdsh._cdsh").attr("CdshError");
      py::object err = type(py::str(e.what()));
      err.attr("code") = std::string(error_message(e.code()));
      PyErr_SetObject(type.ptr(), err.ptr());
    }
  });

  m.def("account_sizes", [](const std::string& group) {
    const SizeReport r = protocol::account_sizes(*Group::by_name(group));
    py::dict d;
    d["upload_message"] = r.upload_message_bits;
    d["ledger_record"] = r.ledger_record_bits;
    d["request_message"] = r.request_message_bits;
    d["transfer_response"] = r.transfer_response_bits;
    d["upload_phase"] = r.upload_phase_bits();
    d["request_phase"] = r.request_phase_bits();
    return d;
  }, py::arg("group") = "production", "Wire sizes in bits.");

  m.def("bench_ops", [](const std::string& group, std::size_t reps, std::size_t warmup, std::size_t x_samples,
                        unsigned zeta, std::uint64_t seed) {
    bench::OpsOptions o{reps, warmup, x_samples, zeta, seed};
    std::vector<bench::BenchReport> rows;
    {
      py::gil_scoped_release release;
      rows = bench::bench_ops(*Group::by_name(group), o);
    }
    py::list out;
    for (const auto& r : rows) {
      py::dict d;
      d["op"] = r.op;
      d["description"] = r.description;
      d["samples"] = r.samples;
      d["mean_ms"] = r.mean_ms;
      d["median_ms"] = r.median_ms;
      d["p95_ms"] = r.p95_ms;
      d["group"] = r.group;
      d["machine"] = r.machine;
      out.append(d);
    }
    return out;
  }, py::arg("group") = "production", py::arg("reps") = 100, py::arg("warmup") = 10, py::arg("x_samples") = 1000,
     py::arg("zeta") = kDefaultZeta, py::arg("seed") = 1);

  m.def("bench_batch", [](std::vector<std::size_t> ns, std::size_t trials, unsigned zeta, std::uint64_t seed,
                          const std::string& group) {
    bench::BatchOptions o;
    o.ns = std::move(ns);
    o.trials = trials;
    o.zeta = zeta;
    o.seed = seed;
    o.group = group;
    bench::BatchSweep s;
    {
      py::gil_scoped_release release;
      s = bench::bench_batch(o);
    }
    py::list pts;
    for (const auto& p : s.points) {
      py::dict d;
      d["n"] = p.n;
      d["batch_ms"] = p.batch_ms;
      d["individual_ms"] = p.individual_ms;
      pts.append(d);
    }
    py::dict d;
    d["points"] = pts;
    d["slope"] = s.batch_fit.slope;
    d["intercept"] = s.batch_fit.intercept;
    d["r2"] = s.batch_fit.r2;
    return d;
  }, py::arg("ns") = std::vector<std::size_t>{10, 20, 30, 40, 50}, py::arg("trials") = 3,
     py::arg("zeta") = kDefaultZeta, py::arg("seed") = 1, py::arg("group") = "production");

  py::class_<World>(m, "World")
      .def(py::init([](const std::string& config_json) {
             return std::make_unique<World>(WorldConfig::from_json(config_json.empty() ? "{}" : config_json));
           }),
           py::arg("config_json") = "", "Build a world from a JSON config (empty for defaults).")
      .def_property_readonly("config_json", [](const World& w) { return w.config().to_json(); })
      .def_property_readonly("group", [](const World& w) { return w.group().name(); })
      .def_property_readonly("now", &World::now)
      .def("advance", &World::advance, py::arg("seconds"))
      .def("device_names", &World::device_names)
      .def("domains", [](const World& w) {
        py::list out;
        for (const auto& d : w.domains()) {
          py::dict e;
          e["index"] = d.index;
          e["es_ids"] = d.es_ids;
          e["devices"] = d.devices;
          out.append(e);
        }
        return out;
      })
      .def("did", [](const World& w, const std::string& name) { return w.device(name).creds.did.display(); },
           py::arg("device"))
      .def("register_device", [](World& w, std::uint32_t domain, const std::string& name) {
        w.register_device(domain, name);
      }, py::arg("domain"), py::arg("name"))
      .def("grant", &World::grant, py::arg("device"), py::arg("m_type"))
      .def("upload", [](World& w, const std::string& device, const py::bytes& m, const std::string& m_type) {
        const UploadMessage msg = w.device_upload(device, from_py(m), m_type);
        const UploadOutcome o = w.es_receive_upload(w.device(device).home_es, msg);
        py::dict d;
        d["stored"] = o.stored.has_value();
        d["error"] = error_or_none(o.rejected);
        d["pid"] = to_py(wire::encode_pseudonym(w.group(), msg.pid));
        d["wire"] = to_py(wire::encode(w.group(), msg));
        return d;
      }, py::arg("device"), py::arg("m"), py::arg("m_type"), "Device upload received by its home ES.")
      .def("receive_upload_bytes", [](World& w, const std::string& es_id, const py::bytes& wire_bytes) {
        const UploadOutcome o = w.es_receive_upload(es_id, wire::decode_upload(w.group(), from_py(wire_bytes)));
        py::dict d;
        d["stored"] = o.stored.has_value();
        d["error"] = error_or_none(o.rejected);
        return d;
      }, py::arg("es_id"), py::arg("wire"))
      .def("request", [](World& w, const std::string& device, const std::string& m_type) {
        return request_dict(w, w.request_pipeline(device, m_type));
      }, py::arg("device"), py::arg("m_type"))
      .def("trace", [](const World& w, const py::bytes& pid) {
        return protocol::trace_identity(w.params(), wire::decode_pseudonym(w.group(), from_py(pid)), w.es_secret())
            .display();
      }, py::arg("pid"), "DID behind an encoded pseudonym.")
      .def("report", [](World& w, const std::string& reporter, const py::bytes& pid) {
        return w.revoke_flow(TamperReport{reporter, wire::decode_pseudonym(w.group(), from_py(pid))}).display();
      }, py::arg("reporter"), py::arg("pid"), "Trace and flag the producer; returns its DID.")
      .def("run_scenario", [](World& w, const std::string& script_json) {
        const ScenarioResult r = w.run_scenario(Script::from_json(script_json));
        py::dict d;
        d["messages"] = r.transcript.size();
        d["metrics"] = metrics_dict(r.metrics);
        py::list reqs;
        for (const auto& q : r.requests) reqs.append(request_dict(w, q));
        d["requests"] = reqs;
        return d;
      }, py::arg("script_json"))
      .def("happy_path", [](World& w, const std::string& m_type) {
        const ScenarioResult r = w.run_scenario(happy_path_script(w, m_type));
        return request_dict(w, r.requests.at(0));
      }, py::arg("m_type") = "temp")
      .def("inject_adversary", [](World& w, const std::string& kind, std::size_t trials, const std::string& victim,
                                  const std::string& requester) {
        AdversaryScript a;
        a.kind = adversary_kind_from_string(kind);
        a.trials = trials;
        a.victim = victim;
        a.requester = requester;
        return report_dict(w.inject_adversary(a));
      }, py::arg("kind"), py::arg("trials") = 100, py::arg("victim") = "", py::arg("requester") = "")
      .def("metrics", [](const World& w) { return metrics_dict(w.metrics()); })
      .def("transcript_size", [](const World& w) { return w.transcript().size(); })
      .def("transcript_binary", [](const World& w) { return to_py(w.transcript().export_binary()); })
      .def("transcript_log", [](const World& w) { return w.transcript().export_log(); })
      .def("scan_for_secrets", [](const World& w) { return w.scan_for_secrets(w.transcript()); })
      .def("ledger_length", [](const World& w) { return w.ledger().length(); })
      .def("verify_chain", [](const World& w, const std::string& replica) { return w.ledger().verify_chain(replica); },
           py::arg("replica") = "")
      .def("replicas_consistent", [](const World& w) { return w.ledger().replicas_consistent(); })
      .def("replica_ids", [](const World& w) { return w.ledger().replica_ids(); })
      .def("tamper_ledger", [](World& w, const std::string& replica, std::uint64_t height, std::size_t pos,
                               std::uint8_t mask) { w.ledger().tamper_record_byte(replica, height, pos, mask); },
           py::arg("replica"), py::arg("height"), py::arg("pos"), py::arg("mask") = 1)
      .def("dump_ledger", [](const World& w, const std::string& path) { w.ledger().dump(path); }, py::arg("path"))
      .def("state_digest", [](const World& w) { return to_hex(w.state_digest()); });
}
