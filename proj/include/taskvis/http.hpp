#pragma once
// HTTP+JSON endpoints over the engine and dataset registry.
//
//   POST  /api/datasets                      upload CSV or a JSON record array
//   GET   /api/datasets/{id}                 field report
//   PATCH /api/datasets/{id}/fields/{name}   {"type": ...} and/or {"geo_role": ...}
//   GET   /api/tasks                         task descriptors
//   POST  /api/recommend                     recommendation request

#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "taskvis/service.hpp"

namespace taskvis {

struct ServiceLimits {
  std::size_t max_upload_bytes = 64 * 1024 * 1024;
  std::size_t max_rows = 1'000'000;
};

class Service {
 public:
  Service(const EngineConfig& cfg, ServiceLimits limits = {}) : engine_(cfg), limits_(limits) {}

  Engine& engine() { return engine_; }
  Registry& registry() { return registry_; }

  void install(httplib::Server& server) {
    server.set_payload_max_length(limits_.max_upload_bytes);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/api/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { upload(req, res); });
    });
    server.Get(R"(/api/datasets/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send(res, 200, field_report(*registry_.get(req.matches[1]))); });
    });
    server.Patch(R"(/api/datasets/([^/]+)/fields/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { patch_field(req, res); });
    });
    server.Get("/api/tasks", [](const httplib::Request&, httplib::Response& res) { send(res, 200, tasks_report()); });
    server.Post("/api/recommend", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { recommend(req, res); });
    });
  }

 private:
  template <class J>
  static void send(httplib::Response& res, int status, const J& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void fail(httplib::Response& res, int status, const std::string& message) {
    send(res, status, nlohmann::json{{"error", message}});
  }

  template <class F>
  static void guarded(httplib::Response& res, F body) {
    try {
      body();
    } catch (const DatasetTooLarge& e) {
      fail(res, 413, e.what());
    } catch (const IngestionError& e) {
      fail(res, 400, e.what());
    } catch (const NotFound& e) {
      fail(res, 404, e.what());
    } catch (const ConversionError& e) {
      fail(res, 422, e.what());
    } catch (const ValidationError& e) {
      fail(res, 422, e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(res, 400, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    }
  }

  void upload(const httplib::Request& req, httplib::Response& res) {
    if (req.body.empty()) throw IngestionError("empty upload");
    LoadOptions opts;
    opts.max_rows = limits_.max_rows;
    const std::string format = req.has_param("format") ? req.get_param_value("format") : "";
    if (format == "csv") {
      opts.format = LoadOptions::Format::csv;
    } else if (format == "json") {
      opts.format = LoadOptions::Format::json;
    } else if (!format.empty()) {
      throw IngestionError("unknown format '" + format + "'");
    }
    const std::string id = registry_.add(req.body, opts);
    send(res, 201, field_report(*registry_.get(id)));
  }

  void patch_field(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const std::string name = httplib::detail::decode_url(req.matches[2], false);
    const auto body = nlohmann::json::parse(req.body);
    if (!body.is_object() || (!body.contains("type") && !body.contains("geo_role"))) {
      throw ValidationError("expected {\"type\": ...} or {\"geo_role\": ...}");
    }
    auto updated = registry_.update(id, [&](const Dataset& ds) {
      if (!ds.has_field(name)) throw NotFound("unknown field '" + name + "'");
      Dataset next = ds;
      if (body.contains("type")) {
        const auto t = parse_field_type(body["type"].get<std::string>());
        if (!t) throw ValidationError("unknown type '" + body["type"].get<std::string>() + "'");
        next = override_field_type(next, name, *t);
      }
      if (body.contains("geo_role")) {
        std::optional<GeoRole> role;
        if (!body["geo_role"].is_null()) {
          role = parse_geo_role(body["geo_role"].get<std::string>());
          if (!role) throw ValidationError("unknown geo_role '" + body["geo_role"].get<std::string>() + "'");
        }
        next = set_geo_role(next, name, role);
      }
      return next;
    });
    send(res, 200, field_report(*updated));
  }

  void recommend(const httplib::Request& req, httplib::Response& res) {
    const auto request = request_from_json(nlohmann::json::parse(req.body));
    const auto ds = registry_.get(request.dataset_id);
    send(res, 200, response_to_json(engine_.recommend(*ds, request)));
  }

  Engine engine_;
  Registry registry_;
  ServiceLimits limits_;
};

}  // namespace taskvis
