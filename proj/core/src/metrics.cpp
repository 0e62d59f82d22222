#include "segfin/metrics.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace segfin {

namespace {

struct MaskCounts {
    std::size_t a = 0, b = 0, inter = 0, uni = 0;
};

MaskCounts mask_counts(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.h != gt.h || pred.w != gt.w)
        throw std::invalid_argument("metrics: mask dimension mismatch");
    MaskCounts c;
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        bool pa = pred.v[i] != 0, pb = gt.v[i] != 0;
        c.a += pa;
        c.b += pb;
        c.inter += pa && pb;
        c.uni += pa || pb;
    }
    return c;
}

} // namespace

double mdr(const BinaryMask& pred, const BinaryMask& gt) {
    MaskCounts c = mask_counts(pred, gt);
    if (c.b == 0) throw std::invalid_argument("mdr: empty ground truth");
    return static_cast<double>(c.b - c.inter) / static_cast<double>(c.b);
}

double fdr(const BinaryMask& pred, const BinaryMask& gt) {
    MaskCounts c = mask_counts(pred, gt);
    if (c.a == 0) return 0.0;
    return static_cast<double>(c.a - c.inter) / static_cast<double>(c.a);
}

double iou(const BinaryMask& pred, const BinaryMask& gt) {
    MaskCounts c = mask_counts(pred, gt);
    if (c.uni == 0) throw std::invalid_argument("iou: both masks empty");
    return static_cast<double>(c.inter) / static_cast<double>(c.uni);
}

MetricsReport evaluate(const std::vector<GroundTruthSample>& dataset, const Segmenter& segmenter,
                       const std::string& label, int workers) {
    MetricsReport report;
    report.config_label = label;

    struct Slot {
        bool skipped = false;
        PerImageMetrics m;
    };
    std::vector<Slot> slots(dataset.size());

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const GroundTruthSample& s = dataset[i];
            Slot& slot = slots[i];
            slot.m.id = s.image.id;
            if (!s.has_mask() || s.mask.empty_mask()) {
                slot.skipped = true;
                continue;
            }
            auto t0 = std::chrono::steady_clock::now();
            BinaryMask pred = segmenter(s.image);
            auto t1 = std::chrono::steady_clock::now();
            slot.m.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            slot.m.mdr = mdr(pred, s.mask);
            slot.m.fdr = fdr(pred, s.mask);
            slot.m.iou = iou(pred, s.mask);
        }
    };

    workers = std::max(1, workers);
    if (workers == 1 || dataset.size() < 2) {
        run_range(0, dataset.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (dataset.size() + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            std::size_t begin = static_cast<std::size_t>(t) * chunk;
            std::size_t end = std::min(dataset.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    for (Slot& slot : slots) {
        if (slot.skipped) {
            report.skipped.push_back(slot.m.id);
            continue;
        }
        report.per_image.push_back(slot.m);
    }
    if (!report.per_image.empty()) {
        for (const PerImageMetrics& m : report.per_image) {
            report.mdr += m.mdr;
            report.fdr += m.fdr;
            report.iou += m.iou;
            report.timing_ms += m.ms;
        }
        const double n = static_cast<double>(report.per_image.size());
        report.mdr /= n;
        report.fdr /= n;
        report.iou /= n;
        report.timing_ms /= n;
    }
    return report;
}

MetricsReport evaluate(const std::vector<GroundTruthSample>& dataset, const SegModel& model,
                       const PipelineConfig& config, const std::string& label, int workers) {
    Segmenter fn = [&model, config](const LatentImage& img) {
        return segment(img, model, config).mask;
    };
    return evaluate(dataset, fn, label, workers);
}

const std::vector<AblationSpec>& ablation_specs() {
    static const std::vector<AblationSpec> specs = {
        {"w/o AM & VF", false, false},
        {"with AM", true, false},
        {"with VF", false, true},
        {"full", true, true},
    };
    return specs;
}

PipelineConfig ablation_config(const PipelineConfig& base, const AblationSpec& spec) {
    PipelineConfig c = base;
    c.use_attention = spec.use_attention;
    c.use_voting = spec.use_voting;
    return c;
}

std::string report_table(const std::vector<MetricsReport>& reports) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %10s %9s %9s %9s %8s\n", "Configuration", "Time(ms)",
                  "MDR", "FDR", "IoU", "Images");
    os << line;
    for (const MetricsReport& r : reports) {
        std::snprintf(line, sizeof(line), "%-16s %10.1f %8.2f%% %8.2f%% %8.2f%% %8zu\n",
                      r.config_label.c_str(), r.timing_ms, 100.0 * r.mdr, 100.0 * r.fdr,
                      100.0 * r.iou, r.per_image.size());
        os << line;
    }
    return os.str();
}

std::string report_json(const std::vector<MetricsReport>& reports) {
    json out = json::array();
    for (const MetricsReport& r : reports) {
        json jr;
        jr["config_label"] = r.config_label;
        jr["mdr"] = r.mdr;
        jr["fdr"] = r.fdr;
        jr["iou"] = r.iou;
        jr["timing_ms"] = r.timing_ms;
        jr["skipped"] = r.skipped;
        json rows = json::array();
        for (const PerImageMetrics& m : r.per_image)
            rows.push_back({{"id", m.id}, {"mdr", m.mdr}, {"fdr", m.fdr}, {"iou", m.iou}, {"ms", m.ms}});
        jr["per_image"] = rows;
        out.push_back(jr);
    }
    return out.dump(2);
}

} // namespace segfin
