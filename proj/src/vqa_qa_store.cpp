#include "osmeval/vqa/qa_store.hpp"

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"
#include "osmeval/text.hpp"

namespace osmeval::vqa {

using nlohmann::json;

namespace {

std::string status_name(QAStatus status) {
    switch (status) {
        case QAStatus::Generated: return "generated";
        case QAStatus::Validated: return "validated";
        case QAStatus::Rejected: return "rejected";
    }
    return "generated";
}

QAStatus status_from_name(const std::string& name, const std::string& context) {
    if (name == "generated") return QAStatus::Generated;
    if (name == "validated") return QAStatus::Validated;
    if (name == "rejected") return QAStatus::Rejected;
    throw SchemaError(context + ": unknown item status '" + name + "'");
}

json quotas_to_json(const CategoryQuota& quotas) {
    json doc;
    for (QACategory category : kAllCategories) {
        doc[std::string(category_name(category))] = quotas.ratio(category);
    }
    return doc;
}

CategoryQuota quotas_from_json(const json& doc, const std::string& context) {
    CategoryQuota quotas;
    for (QACategory category : kAllCategories) {
        quotas.ratios[static_cast<std::size_t>(category)] =
            require_number(doc, category_name(category), context);
    }
    quotas.validate();
    return quotas;
}

}  // namespace

std::string qa_set_to_string(const QASet& set) {
    json header{{"dataset", set.header.dataset},
                {"scene", set.header.scene},
                {"condition", condition_name(set.header.condition)},
                {"quotas", quotas_to_json(set.header.quotas)},
                {"seed", set.header.seed},
                {"prompt_template_hashes", set.header.prompt_template_hashes},
                {"model_id", set.header.model_id}};
    json items = json::array();
    for (const auto& item : set.items) {
        json record{{"qa_id", item.qa_id},
                    {"category", category_name(item.category)},
                    {"question", item.question},
                    {"gt_answer", item.gt_answer},
                    {"source_frames", item.source_frames},
                    {"referenced_objects", item.referenced_objects},
                    {"status", status_name(item.status)}};
        if (item.status == QAStatus::Rejected) {
            record["rejection_reason"] = item.rejection_reason;
        }
        items.push_back(std::move(record));
    }
    return canonical_dump(json{{"header", std::move(header)}, {"items", std::move(items)}});
}

QASet qa_set_from_string(const std::string& text, const std::string& context) {
    const json doc = parse_json_text(text, context);
    expect_object(doc, {"header", "items"}, context);
    const json& header = require_field(doc, "header", context);
    expect_object(header,
                  {"dataset", "scene", "condition", "quotas", "seed", "prompt_template_hashes",
                   "model_id"},
                  context);

    QASet set;
    set.header.dataset = require_string(header, "dataset", context);
    set.header.scene = require_string(header, "scene", context);
    const std::string cond = require_string(header, "condition", context);
    const auto kind = condition_from_name(cond);
    if (!kind) throw SchemaError(context + ": unknown condition '" + cond + "'");
    set.header.condition = *kind;
    set.header.quotas = quotas_from_json(require_field(header, "quotas", context), context);
    set.header.seed = require_field(header, "seed", context).get<std::uint64_t>();
    if (header.contains("prompt_template_hashes")) {
        for (const auto& [key, value] : header["prompt_template_hashes"].items()) {
            set.header.prompt_template_hashes[key] = value.get<std::string>();
        }
    }
    set.header.model_id = require_string(header, "model_id", context);

    const json& items = require_field(doc, "items", context);
    if (!items.is_array()) throw SchemaError(context + ": 'items' must be an array");
    for (const json& record : items) {
        expect_object(record,
                      {"qa_id", "category", "question", "gt_answer", "source_frames",
                       "referenced_objects", "status", "rejection_reason"},
                      context);
        QAItem item;
        item.qa_id = require_string(record, "qa_id", context);
        const std::string cat = require_string(record, "category", context);
        const auto category = category_from_name(cat);
        if (!category) throw SchemaError(context + ": unknown category '" + cat + "'");
        item.category = *category;
        item.question = require_string(record, "question", context);
        item.gt_answer = require_string(record, "gt_answer", context);
        for (const json& f : require_field(record, "source_frames", context)) {
            item.source_frames.push_back(f.get<int>());
        }
        for (const json& o : require_field(record, "referenced_objects", context)) {
            item.referenced_objects.push_back(o.get<std::string>());
        }
        item.status = status_from_name(require_string(record, "status", context), context);
        if (record.contains("rejection_reason")) {
            item.rejection_reason = record["rejection_reason"].get<std::string>();
        }
        if (item.status == QAStatus::Validated) {
            if (item.gt_answer.empty()) {
                throw SchemaError(context + ": validated item '" + item.qa_id +
                                  "' has an empty gt_answer");
            }
            if (is_binary(item.category) && item.gt_answer != "yes" && item.gt_answer != "no") {
                throw SchemaError(context + ": validated binary item '" + item.qa_id +
                                  "' must answer yes/no, got '" + item.gt_answer + "'");
            }
        }
        set.items.push_back(std::move(item));
    }
    return set;
}

void store_qa_set(const QASet& set, const std::filesystem::path& path) {
    write_text_file_atomic(path, qa_set_to_string(set));
}

QASet load_qa_set(const std::filesystem::path& path) {
    return qa_set_from_string(read_text_file(path), path.string());
}

}  // namespace osmeval::vqa
