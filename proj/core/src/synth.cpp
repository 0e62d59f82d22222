#include "segfin/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace segfin {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Smooth scalar field from a coarse grid of values, bilinearly upsampled.
class CoarseField {
public:
    CoarseField(Rng& rng, int cells, double lo, double hi) : cells_(cells) {
        grid_.resize(static_cast<std::size_t>(cells) * cells);
        for (double& g : grid_) g = rng.uniform(lo, hi);
    }

    double at(double u, double v) const { // u, v in [0,1]
        double x = std::clamp(u, 0.0, 1.0) * (cells_ - 1);
        double y = std::clamp(v, 0.0, 1.0) * (cells_ - 1);
        int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
        int x1 = std::min(x0 + 1, cells_ - 1), y1 = std::min(y0 + 1, cells_ - 1);
        double fx = x - x0, fy = y - y0;
        auto g = [&](int yy, int xx) { return grid_[static_cast<std::size_t>(yy) * cells_ + xx]; };
        return (1 - fy) * ((1 - fx) * g(y0, x0) + fx * g(y0, x1)) +
               fy * ((1 - fx) * g(y1, x0) + fx * g(y1, x1));
    }

private:
    int cells_;
    std::vector<double> grid_;
};

struct EllipseSpec {
    double cx, cy;   // center
    double ax, ay;   // semi-axes before rotation
    double rot;      // radians
    double cos_r, sin_r;

    // Normalized radius: <= 1 inside the ellipse.
    double rho(double x, double y) const {
        double dx = x - cx, dy = y - cy;
        double u = dx * cos_r + dy * sin_r;
        double v = -dx * sin_r + dy * cos_r;
        return std::sqrt((u / ax) * (u / ax) + (v / ay) * (v / ay));
    }

    Box bounding(double scale) const {
        double ex = std::sqrt(ax * ax * cos_r * cos_r + ay * ay * sin_r * sin_r) * scale;
        double ey = std::sqrt(ax * ax * sin_r * sin_r + ay * ay * cos_r * cos_r) * scale;
        return Box{cx - ex, cy - ey, cx + ex, cy + ey};
    }
};

void draw_line(std::vector<double>& canvas, int size, double x0, double y0, double x1, double y1,
               double halfwidth, double delta) {
    double minx = std::min(x0, x1) - halfwidth - 1, maxx = std::max(x0, x1) + halfwidth + 1;
    double miny = std::min(y0, y1) - halfwidth - 1, maxy = std::max(y0, y1) + halfwidth + 1;
    int ax0 = std::clamp(static_cast<int>(minx), 0, size - 1);
    int ax1 = std::clamp(static_cast<int>(maxx) + 1, 0, size);
    int ay0 = std::clamp(static_cast<int>(miny), 0, size - 1);
    int ay1 = std::clamp(static_cast<int>(maxy) + 1, 0, size);
    double dx = x1 - x0, dy = y1 - y0;
    double len2 = dx * dx + dy * dy;
    for (int y = ay0; y < ay1; ++y) {
        for (int x = ax0; x < ax1; ++x) {
            double t = len2 > 0 ? std::clamp(((x - x0) * dx + (y - y0) * dy) / len2, 0.0, 1.0) : 0.0;
            double px = x0 + t * dx, py = y0 + t * dy;
            double d = std::hypot(x - px, y - py);
            if (d < halfwidth) canvas[static_cast<std::size_t>(y) * size + x] += delta;
        }
    }
}

void box_blur3(std::vector<double>& v, int size) {
    std::vector<double> tmp(v.size());
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double acc = 0.0;
            int n = 0;
            for (int dx = -1; dx <= 1; ++dx) {
                int xx = x + dx;
                if (xx < 0 || xx >= size) continue;
                acc += v[static_cast<std::size_t>(y) * size + xx];
                ++n;
            }
            tmp[static_cast<std::size_t>(y) * size + x] = acc / n;
        }
    }
    for (int x = 0; x < size; ++x) {
        for (int y = 0; y < size; ++y) {
            double acc = 0.0;
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                int yy = y + dy;
                if (yy < 0 || yy >= size) continue;
                acc += tmp[static_cast<std::size_t>(yy) * size + x];
                ++n;
            }
            v[static_cast<std::size_t>(y) * size + x] = acc / n;
        }
    }
}

} // namespace

void SynthParams::validate() const {
    if (image_size < 128) throw std::invalid_argument("synth: image_size must be >= 128");
    if (ridge_period < 4.0) throw std::invalid_argument("synth: ridge_period must be >= 4");
    if (n_fingermarks < 1 || n_fingermarks > 3)
        throw std::invalid_argument("synth: n_fingermarks must be in 1..3");
    if (clutter_level < 0.0 || clutter_level > 1.0)
        throw std::invalid_argument("synth: clutter_level must be in [0,1]");
    if (marker_probability < 0.0 || marker_probability > 1.0)
        throw std::invalid_argument("synth: marker_probability must be in [0,1]");
}

GroundTruthSample synth_latent(const SynthParams& params, std::uint64_t seed) {
    params.validate();
    const int size = params.image_size;
    Rng rng(seed);

    // Background: base level + low-frequency shading + pixel noise.
    std::vector<double> canvas(static_cast<std::size_t>(size) * size);
    double base = rng.uniform(150.0, 205.0);
    CoarseField shading(rng, 6, -22.0, 22.0);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            canvas[static_cast<std::size_t>(y) * size + x] =
                base + shading.at(static_cast<double>(x) / size, static_cast<double>(y) / size);

    // Clutter: dark strokes and soft blobs.
    int n_lines = static_cast<int>(std::lround(params.clutter_level * 8));
    for (int i = 0; i < n_lines; ++i) {
        double x0 = rng.uniform(0, size), y0 = rng.uniform(0, size);
        double x1 = rng.uniform(0, size), y1 = rng.uniform(0, size);
        double hw = rng.uniform(0.8, 2.2);
        double delta = -rng.uniform(35.0, 85.0);
        draw_line(canvas, size, x0, y0, x1, y1, hw, delta);
    }
    int n_blobs = static_cast<int>(std::lround(params.clutter_level * 6));
    for (int i = 0; i < n_blobs; ++i) {
        double cx = rng.uniform(0, size), cy = rng.uniform(0, size);
        double r = rng.uniform(5.0, 20.0);
        double delta = rng.uniform(-60.0, 45.0);
        int x0 = std::clamp(static_cast<int>(cx - r) - 1, 0, size - 1);
        int x1 = std::clamp(static_cast<int>(cx + r) + 2, 0, size);
        int y0 = std::clamp(static_cast<int>(cy - r) - 1, 0, size - 1);
        int y1 = std::clamp(static_cast<int>(cy + r) + 2, 0, size);
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) {
                double d = std::hypot(x - cx, y - cy) / r;
                if (d < 1.0)
                    canvas[static_cast<std::size_t>(y) * size + x] += delta * (1.0 - d * d);
            }
    }
    for (auto& v : canvas) v += rng.uniform(-7.0, 7.0);

    GroundTruthSample sample;
    sample.seed = seed;
    sample.mask = BinaryMask::zeros(size, size);

    // Fingermarks: oriented sinusoid ridges inside a rotated ellipse support.
    for (int k = 0; k < params.n_fingermarks; ++k) {
        EllipseSpec e;
        double margin = 0.30 * size;
        e.cx = rng.uniform(margin, size - margin);
        e.cy = rng.uniform(margin, size - margin);
        e.ax = size * rng.uniform(0.14, 0.20);
        e.ay = e.ax * rng.uniform(1.15, 1.45);
        e.rot = rng.uniform(0.0, kPi);
        e.cos_r = std::cos(e.rot);
        e.sin_r = std::sin(e.rot);

        double theta0 = rng.uniform(0.0, kPi);
        CoarseField theta_jitter(rng, 3, -0.55, 0.55);
        CoarseField phase_jitter(rng, 3, -1.6, 1.6);
        double contrast = rng.uniform(55.0, 95.0);
        double freq = 2.0 * kPi / params.ridge_period;

        Box support = e.bounding(1.0).clipped(size, size);
        int x0 = static_cast<int>(support.x0), x1 = static_cast<int>(std::ceil(support.x1));
        int y0 = static_cast<int>(support.y0), y1 = static_cast<int>(std::ceil(support.y1));

        std::vector<double> ridge(static_cast<std::size_t>(size) * size, 0.0);
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                double rho = e.rho(x, y);
                if (rho > 1.0) continue;
                sample.mask.set(y, x, true);
                double u = static_cast<double>(x) / size, v = static_cast<double>(y) / size;
                double theta = theta0 + theta_jitter.at(u, v);
                double phase = freq * (x * std::cos(theta) + y * std::sin(theta)) +
                               phase_jitter.at(u, v);
                double s = std::sin(phase);
                double fade = std::clamp((1.0 - rho) * 7.0, 0.0, 1.0);
                ridge[static_cast<std::size_t>(y) * size + x] = (s > 0.0 ? 1.0 : 0.0) * fade;
            }
        }
        box_blur3(ridge, size);
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                canvas[static_cast<std::size_t>(y) * size + x] -=
                    contrast * ridge[static_cast<std::size_t>(y) * size + x];

        // Examiner-style marker stroke around the fingermark.
        double marker_draw = rng.uniform();
        if (marker_draw < params.marker_probability) {
            double ring = rng.uniform(1.24, 1.34);
            double stroke = rng.uniform(0.035, 0.055);
            Box mb = e.bounding(ring + stroke);
            int mx0 = std::clamp(static_cast<int>(mb.x0), 0, size - 1);
            int mx1 = std::clamp(static_cast<int>(std::ceil(mb.x1)), 0, size);
            int my0 = std::clamp(static_cast<int>(mb.y0), 0, size - 1);
            int my1 = std::clamp(static_cast<int>(std::ceil(mb.y1)), 0, size);
            for (int y = my0; y < my1; ++y)
                for (int x = mx0; x < mx1; ++x) {
                    double rho = e.rho(x, y);
                    if (std::fabs(rho - ring) < stroke)
                        canvas[static_cast<std::size_t>(y) * size + x] -= 120.0;
                }
            sample.attention_regions.push_back(e.bounding(ring + stroke).clipped(size, size));
        }
    }

    sample.image.height = size;
    sample.image.width = size;
    sample.image.pixels.resize(canvas.size());
    for (std::size_t i = 0; i < canvas.size(); ++i)
        sample.image.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::round(canvas[i]), 0.0, 255.0));
    return sample;
}

AugmentParams sample_augment_params(Rng& rng, int image_size) {
    AugmentParams p;
    p.angle_deg = rng.uniform(-30.0, 30.0);
    p.scale = rng.uniform(0.8, 1.25);
    p.shift_x = rng.uniform(-0.15, 0.15) * image_size;
    p.shift_y = rng.uniform(-0.15, 0.15) * image_size;
    p.crop_frac = rng.uniform(0.87, 1.0); // keeps crop area >= 75%
    p.crop_off_x = rng.uniform();
    p.crop_off_y = rng.uniform();
    return p;
}

GroundTruthSample apply_augment(const GroundTruthSample& sample, const AugmentParams& params) {
    const int h = sample.image.height, w = sample.image.width;
    const double cx = 0.5 * w, cy = 0.5 * h;
    const double rad = params.angle_deg * kPi / 180.0;
    const double ca = std::cos(rad), sa = std::sin(rad);

    // Crop window (identity when crop_frac == 1).
    int cw = std::max(1, static_cast<int>(std::lround(params.crop_frac * w)));
    int ch = std::max(1, static_cast<int>(std::lround(params.crop_frac * h)));
    int ox = static_cast<int>(std::lround(params.crop_off_x * (w - cw)));
    int oy = static_cast<int>(std::lround(params.crop_off_y * (h - ch)));

    GroundTruthSample out;
    out.seed = sample.seed;
    out.image = LatentImage::filled(h, w, 170, sample.image.id);
    out.mask = BinaryMask::zeros(h, w);

    // Inverse mapping: output pixel -> input point.
    auto inverse = [&](double px, double py, double& qx, double& qy) {
        double dx = (px - cx - params.shift_x) / params.scale;
        double dy = (py - cy - params.shift_y) / params.scale;
        qx = ca * dx + sa * dy + cx;
        qy = -sa * dx + ca * dy + cy;
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool in_window = x >= ox && x < ox + cw && y >= oy && y < oy + ch;
            if (!in_window) continue;
            double qx, qy;
            inverse(x, y, qx, qy);
            int nx = static_cast<int>(std::lround(qx));
            int ny = static_cast<int>(std::lround(qy));
            bool inside = nx >= 0 && nx < w && ny >= 0 && ny < h;
            if (inside) out.mask.set(y, x, sample.mask.at(ny, nx));
            if (qx >= 0.0 && qx <= w - 1.0 && qy >= 0.0 && qy <= h - 1.0) {
                int x0 = static_cast<int>(qx), y0 = static_cast<int>(qy);
                int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
                double fx = qx - x0, fy = qy - y0;
                double v = (1 - fy) * ((1 - fx) * sample.image.at(y0, x0) + fx * sample.image.at(y0, x1)) +
                           fy * ((1 - fx) * sample.image.at(y1, x0) + fx * sample.image.at(y1, x1));
                out.image.at(y, x) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
            }
        }
    }

    // Forward transform for the attention boxes.
    auto forward = [&](double qx, double qy, double& px, double& py) {
        double dx = qx - cx, dy = qy - cy;
        px = params.scale * (ca * dx - sa * dy) + cx + params.shift_x;
        py = params.scale * (sa * dx + ca * dy) + cy + params.shift_y;
    };
    for (const Box& b : sample.attention_regions) {
        double xs[4], ys[4];
        const double corners[4][2] = {{b.x0, b.y0}, {b.x1, b.y0}, {b.x0, b.y1}, {b.x1, b.y1}};
        for (int i = 0; i < 4; ++i) forward(corners[i][0], corners[i][1], xs[i], ys[i]);
        Box nb{*std::min_element(xs, xs + 4), *std::min_element(ys, ys + 4),
               *std::max_element(xs, xs + 4), *std::max_element(ys, ys + 4)};
        nb = Box{std::max(nb.x0, static_cast<double>(ox)), std::max(nb.y0, static_cast<double>(oy)),
                 std::min(nb.x1, static_cast<double>(ox + cw)), std::min(nb.y1, static_cast<double>(oy + ch))};
        if (nb.x1 - nb.x0 >= 2.0 && nb.y1 - nb.y0 >= 2.0) out.attention_regions.push_back(nb);
    }

    double fg = static_cast<double>(out.mask.count()) / (static_cast<double>(h) * w);
    if (fg < 0.02)
        throw std::runtime_error("augment: transform left less than 2% foreground");
    return out;
}

GroundTruthSample augment(const GroundTruthSample& sample, std::uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 10; ++attempt) {
        AugmentParams p = sample_augment_params(rng, sample.image.width);
        try {
            return apply_augment(sample, p);
        } catch (const std::runtime_error&) {
            // resample
        }
    }
    throw std::runtime_error("augment: no transform kept at least 2% foreground after 10 tries");
}

namespace {

std::string sample_id(const GroundTruthSample& s, std::size_t index) {
    if (!s.image.id.empty()) return s.image.id;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "lat%06zu", index);
    return buf;
}

} // namespace

void write_dataset(const std::vector<GroundTruthSample>& samples, const std::string& directory,
                   const SynthParams& params) {
    fs::path root(directory);
    fs::create_directories(root / "images");
    fs::create_directories(root / "masks");
    fs::create_directories(root / "attention");

    json manifest;
    manifest["ids"] = json::array();
    manifest["seeds"] = json::array();
    manifest["params"] = {{"image_size", params.image_size},
                          {"ridge_period", params.ridge_period},
                          {"n_fingermarks", params.n_fingermarks},
                          {"clutter_level", params.clutter_level},
                          {"marker_probability", params.marker_probability}};

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const GroundTruthSample& s = samples[i];
        std::string id = sample_id(s, i);
        LatentImage img = s.image;
        img.id = id;
        save_grayscale(img, (root / "images" / (id + ".png")).string());
        save_mask(s.mask, (root / "masks" / (id + ".png")).string());
        json boxes = json::array();
        for (const Box& b : s.attention_regions)
            boxes.push_back({static_cast<int>(std::lround(b.x0)), static_cast<int>(std::lround(b.y0)),
                             static_cast<int>(std::lround(b.x1)), static_cast<int>(std::lround(b.y1))});
        std::ofstream att(root / "attention" / (id + ".json"));
        att << boxes.dump(2) << "\n";
        manifest["ids"].push_back(id);
        manifest["seeds"].push_back(s.seed);
    }
    std::ofstream mf(root / "manifest.json");
    if (!mf) throw std::runtime_error("cannot write manifest.json in " + directory);
    mf << manifest.dump(2) << "\n";
}

std::vector<GroundTruthSample> load_dataset(const std::string& directory) {
    fs::path root(directory);
    if (!fs::exists(root / "manifest.json"))
        throw std::runtime_error("dataset load: missing manifest.json in " + directory);
    if (!fs::is_directory(root / "images"))
        throw std::runtime_error("dataset load: missing images/ folder in " + directory);
    if (!fs::is_directory(root / "masks"))
        throw std::runtime_error("dataset load: missing masks/ folder in " + directory);

    std::ifstream mf(root / "manifest.json");
    json manifest = json::parse(mf, nullptr, true);
    std::vector<GroundTruthSample> samples;
    std::size_t idx = 0;
    for (const auto& id_j : manifest.at("ids")) {
        std::string id = id_j.get<std::string>();
        GroundTruthSample s;
        s.image = load_grayscale((root / "images" / (id + ".png")).string());
        s.image.id = id;
        fs::path mask_path = root / "masks" / (id + ".png");
        if (fs::exists(mask_path)) {
            s.mask = load_mask(mask_path.string());
            if (s.mask.h != s.image.height || s.mask.w != s.image.width)
                throw std::runtime_error("dataset load: mask dimension mismatch for id " + id);
        }
        fs::path att_path = root / "attention" / (id + ".json");
        if (fs::exists(att_path)) {
            std::ifstream af(att_path);
            json boxes = json::parse(af, nullptr, true);
            for (const auto& b : boxes)
                s.attention_regions.push_back(Box{b.at(0).get<double>(), b.at(1).get<double>(),
                                                  b.at(2).get<double>(), b.at(3).get<double>()});
        }
        if (manifest.contains("seeds") && idx < manifest["seeds"].size())
            s.seed = manifest["seeds"][idx].get<std::uint64_t>();
        samples.push_back(std::move(s));
        ++idx;
    }
    return samples;
}

} // namespace segfin
