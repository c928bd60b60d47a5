#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "osmeval/association.hpp"
#include "osmeval/cli/render.hpp"
#include "osmeval/label_match.hpp"
#include "osmeval/ply_io.hpp"
#include "osmeval/scenario.hpp"
#include "osmeval/seg_metrics.hpp"
#include "osmeval/text.hpp"
#include "osmeval/vqa/judging.hpp"
#include "osmeval/vqa/question.hpp"

namespace py = pybind11;

namespace {

osmeval::ConfusionMatrix make_confusion(std::vector<std::vector<std::int64_t>> counts,
                                        std::vector<std::int64_t> unmatched) {
    const int class_count = static_cast<int>(counts.size());
    osmeval::ConfusionMatrix cm = osmeval::ConfusionMatrix::zeros(class_count);
    for (int c = 0; c < class_count; ++c) {
        if (counts[static_cast<std::size_t>(c)].size() != static_cast<std::size_t>(class_count)) {
            throw osmeval::ContractViolation("confusion counts must be a square matrix");
        }
    }
    cm.counts = std::move(counts);
    if (unmatched.empty()) {
        unmatched.assign(static_cast<std::size_t>(class_count), 0);
    } else if (unmatched.size() != static_cast<std::size_t>(class_count)) {
        throw osmeval::ContractViolation("unmatched must have one entry per class");
    }
    cm.unmatched = std::move(unmatched);
    return cm;
}

osmeval::LabeledPointCloud cloud_from_lists(const std::vector<std::array<double, 3>>& points,
                                            const std::vector<std::int32_t>& class_ids) {
    if (points.size() != class_ids.size()) {
        throw osmeval::ContractViolation("points and class_ids must have equal length");
    }
    osmeval::LabeledPointCloud cloud;
    cloud.points = points;
    cloud.class_ids = class_ids;
    return cloud;
}

bool judge_exact_py(const std::string& category, const std::string& gt_answer,
                    const std::string& answer) {
    const auto cat = osmeval::vqa::category_from_name(category);
    if (!cat) throw osmeval::ContractViolation("unknown category '" + category + "'");
    osmeval::vqa::QAItem item;
    item.qa_id = "py";
    item.category = *cat;
    item.gt_answer = gt_answer;
    osmeval::vqa::SystemAnswer sys{"py", answer, osmeval::vqa::AnswerSource::Direct};
    return osmeval::vqa::judge_exact(item, sys).correct;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core metric and pipeline operations of the osmeval harness";

    py::register_exception<osmeval::Error>(m, "OsmevalError", PyExc_RuntimeError);

    py::class_<osmeval::ConfusionMatrix>(m, "ConfusionMatrix")
        .def(py::init(&make_confusion), py::arg("counts"),
             py::arg("unmatched") = std::vector<std::int64_t>{})
        .def_readonly("class_count", &osmeval::ConfusionMatrix::class_count)
        .def_readonly("counts", &osmeval::ConfusionMatrix::counts)
        .def_readonly("unmatched", &osmeval::ConfusionMatrix::unmatched)
        .def("gt_count", &osmeval::ConfusionMatrix::gt_count, py::arg("class_id"));

    m.def("build_confusion",
          [](const std::vector<std::int32_t>& gt, const std::vector<std::int32_t>& pred,
             int class_count) { return osmeval::build_confusion(gt, pred, class_count); },
          py::arg("gt_classes"), py::arg("matched_pred"), py::arg("class_count"));
    m.def("macc", &osmeval::compute_macc, py::arg("cm"));
    m.def("fmiou", &osmeval::compute_fmiou, py::arg("cm"));
    m.def("iou_per_class",
          [](const osmeval::ConfusionMatrix& cm) {
              std::vector<py::object> out;
              for (const auto& v : osmeval::compute_iou_per_class(cm)) {
                  out.push_back(v ? py::cast(*v) : py::none());
              }
              return out;
          },
          py::arg("cm"));
    m.def("degradation_percent", &osmeval::compute_degradation, py::arg("baseline"),
          py::arg("condition"));
    m.def("aggregate",
          [](const std::vector<double>& values) {
              const auto agg = osmeval::aggregate_metric(values);
              return py::make_tuple(agg.min, agg.max, agg.avg);
          },
          py::arg("values"), "Returns (min, max, avg) of a non-empty value list.");

    m.def("associate_points",
          [](const std::vector<std::array<double, 3>>& gt_points,
             const std::vector<std::int32_t>& gt_classes,
             const std::vector<std::array<double, 3>>& pred_points,
             const std::vector<std::int32_t>& pred_classes, double radius) {
              const auto gt = cloud_from_lists(gt_points, gt_classes);
              const auto pred = cloud_from_lists(pred_points, pred_classes);
              const auto assoc = osmeval::associate_points(gt, pred, radius);
              return py::make_tuple(assoc.pred_index, assoc.pred_class);
          },
          py::arg("gt_points"), py::arg("gt_classes"), py::arg("pred_points"),
          py::arg("pred_classes"), py::arg("radius"),
          "Nearest-prediction association; returns (pred_index, pred_class) with -1 for none.");

    py::class_<osmeval::LabeledPointCloud>(m, "LabeledPointCloud")
        .def_readonly("points", &osmeval::LabeledPointCloud::points)
        .def_readonly("class_ids", &osmeval::LabeledPointCloud::class_ids)
        .def_readonly("instance_ids", &osmeval::LabeledPointCloud::instance_ids)
        .def("__len__", &osmeval::LabeledPointCloud::size);

    m.def("load_point_cloud",
          [](const std::filesystem::path& path, const std::string& label_field,
             int class_count) {
              osmeval::PlyReadOptions options;
              options.label_field = label_field;
              options.class_count = class_count;
              return osmeval::load_point_cloud(path, options);
          },
          py::arg("path"), py::arg("label_field") = "class_id", py::arg("class_count") = 0);
    m.def("save_point_cloud",
          [](const std::filesystem::path& path, const std::vector<std::array<double, 3>>& points,
             const std::vector<std::int32_t>& class_ids, bool binary) {
              osmeval::PlyWriteOptions options;
              options.format = binary ? osmeval::PlyFormat::BinaryLittleEndian
                                      : osmeval::PlyFormat::Ascii;
              osmeval::save_point_cloud(path, cloud_from_lists(points, class_ids), options);
          },
          py::arg("path"), py::arg("points"), py::arg("class_ids"), py::arg("binary") = false);

    m.def("normalize_label", [](const std::string& raw) { return osmeval::normalize_label(raw); },
          py::arg("raw"));
    m.def("match_label_exact",
          [](const std::string& pred, const std::vector<std::string>& vocabulary) {
              const auto vocab = osmeval::make_vocabulary(vocabulary);
              const auto result = osmeval::LabelMatcher().match(pred, vocab);
              return result ? py::cast(*result) : py::object(py::none());
          },
          py::arg("pred"), py::arg("vocabulary"));

    m.def("quota_counts",
          [](const std::vector<double>& ratios, int n_total) {
              if (ratios.size() != osmeval::vqa::kCategoryCount) {
                  throw osmeval::ContractViolation("expected 8 category ratios");
              }
              osmeval::vqa::CategoryQuota quotas;
              std::copy(ratios.begin(), ratios.end(), quotas.ratios.begin());
              const auto counts = osmeval::vqa::largest_remainder_counts(quotas, n_total);
              return std::vector<int>(counts.begin(), counts.end());
          },
          py::arg("ratios"), py::arg("n_total"),
          "Largest-remainder rounding of category quotas; ratios follow category_names().");
    m.def("default_quota_ratios", [] {
        const auto quotas = osmeval::vqa::CategoryQuota::defaults();
        return std::vector<double>(quotas.ratios.begin(), quotas.ratios.end());
    });
    m.def("category_names", [] {
        std::vector<std::string> names;
        for (const auto category : osmeval::vqa::kAllCategories) {
            names.emplace_back(osmeval::vqa::category_name(category));
        }
        return names;
    });

    m.def("judge_exact", &judge_exact_py, py::arg("category"), py::arg("gt_answer"),
          py::arg("answer"),
          "Direct verdict for binary/measurement categories; True when correct.");

    m.def("emit_condition_config",
          [](const std::string& condition) {
              const auto kind = osmeval::condition_from_name(condition);
              if (!kind) throw osmeval::ContractViolation("unknown condition '" + condition + "'");
              return osmeval::condition_config_to_json(osmeval::emit_condition_config(*kind))
                  .dump(2);
          },
          py::arg("condition"), "Condition configuration document as a JSON string.");

    m.def("format_metric", &osmeval::cli::format_fixed, py::arg("value"), py::arg("decimals"),
          "Fixed-point rendering with round-half-even.");
}
