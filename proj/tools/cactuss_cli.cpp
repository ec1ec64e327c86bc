// Command-line front end: phantom, simulate, baseline, dataset, eval.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "cactuss/config.hpp"
#include "cactuss/dataset.hpp"
#include "cactuss/edge_ir.hpp"
#include "cactuss/error.hpp"
#include "cactuss/phantom.hpp"
#include "cactuss/png_io.hpp"
#include "cactuss/raytracer.hpp"
#include "cactuss/volume_io.hpp"

namespace fs = std::filesystem;
using namespace cactuss;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct SimulateArgs {
    std::string volume;
    std::string tissues;
    std::string probe;
    std::string sim;
    std::string axis = "z";
    int index = 0;
    std::string out;
    std::string mask_out;
    int width = 256;
    int height = 256;
    std::string mode;
};

void add_simulate_flags(CLI::App* cmd, SimulateArgs& a) {
    cmd->add_option("--volume", a.volume, "Label volume header (.lmap.json)")->required();
    cmd->add_option("--tissues", a.tissues, "Tissue table JSON (default: built-in table)");
    cmd->add_option("--probe", a.probe, "Probe config JSON (default: built-in scan parameters)");
    cmd->add_option("--sim", a.sim, "Simulation config JSON (default: built-in simulation parameters)");
    cmd->add_option("--axis", a.axis, "Slice axis")->check(CLI::IsMember({"x", "y", "z"}));
    cmd->add_option("--index", a.index, "Slice index")->required();
    cmd->add_option("--out", a.out, "Output PNG")->required();
    cmd->add_option("--mask-out", a.mask_out, "Optional aorta mask PNG");
    cmd->add_option("--width", a.width, "Output width in px")->check(CLI::Range(2, 8192));
    cmd->add_option("--height", a.height, "Output height in px")->check(CLI::Range(2, 8192));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

int run_simulate(const SimulateArgs& a, std::optional<RenderMode> forced_mode) {
    const LabelVolume volume = load_label_volume(a.volume);
    const TissueTable table = a.tissues.empty() ? default_tissue_table() : load_tissue_table(a.tissues);
    const ProbeConfig probe = a.probe.empty() ? ProbeConfig{} : probe_from_json(read_json_file(a.probe));
    SimConfig sim = a.sim.empty() ? SimConfig{} : sim_from_json(read_json_file(a.sim));
    if (forced_mode) sim.mode = *forced_mode;
    const OutSize out{a.width, a.height};
    const Axis axis = parse_axis(a.axis);
    const LabelSlice slice = extract_slice(volume, axis, a.index);

    BModeImage image = sim.mode == RenderMode::edge_ir
                           ? render_edge_ir({synth_ct_slice(slice, table), slice.spacing}, probe, out)
                           : render(slice, table, probe, sim, out);
    write_png(a.out, to_gray8(image.pixels));

    if (!a.mask_out.empty()) {
        Grid2D<std::uint8_t> lumen(slice.width(), slice.height(), 0);
        for (std::size_t i = 0; i < lumen.size(); ++i)
            lumen.values()[i] = slice.labels.values()[i] == labels::kBlood;
        const BModeImage m = scan_convert(mask_fan(lumen, slice.spacing, probe), out, Interp::nearest);
        Grid2D<std::uint8_t> px(out.width, out.height, 0);
        for (std::size_t i = 0; i < px.size(); ++i) px.values()[i] = m.pixels.values()[i] > 0.5;
        write_png(a.mask_out, mask_to_gray8(SegMask(std::move(px), m.spacing)));
    }
    std::cout << "wrote " << a.out << " (" << render_mode_name(sim.mode) << ", " << out.width << "x" << out.height
              << ", " << image.spacing << " mm/px)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultrasound intermediate-representation simulator and evaluation toolkit"};
    app.require_subcommand(1);

    std::string phantom_spec, phantom_out;
    auto* phantom = app.add_subcommand("phantom", "Generate a procedural abdominal label volume");
    phantom->add_option("--spec", phantom_spec, "Phantom spec JSON")->required();
    phantom->add_option("--out", phantom_out, "Output header path (.lmap.json)")->required();

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Render one slice as an intermediate-representation image");
    add_simulate_flags(simulate, sim_args);

    SimulateArgs base_args;
    auto* baseline = app.add_subcommand("baseline", "Render one slice with an alternative representation");
    add_simulate_flags(baseline, base_args);
    baseline->add_option("--mode", base_args.mode, "Alternative representation")
        ->required()
        ->check(CLI::IsMember({"edge_ir", "realistic_us"}));

    std::string ds_config, ds_out;
    int ds_workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    auto* dataset = app.add_subcommand("dataset", "Generate an image/mask dataset with manifest");
    dataset->add_option("--config", ds_config, "Dataset config JSON")->required();
    dataset->add_option("--out-dir", ds_out, "Output directory")->required();
    dataset->add_option("--workers", ds_workers, "Worker threads")->check(CLI::Range(1, 1024));

    std::string ev_pred, ev_gt, ev_out;
    double ev_spacing = 0.0;
    auto* eval = app.add_subcommand("eval", "Compare predicted and ground-truth aorta masks");
    eval->add_option("--pred", ev_pred, "Directory of predicted mask PNGs")->required();
    eval->add_option("--gt", ev_gt, "Directory of ground-truth mask PNGs")->required();
    eval->add_option("--spacing-mm", ev_spacing, "Pixel spacing in mm")->required()->check(CLI::PositiveNumber);
    eval->add_option("--out", ev_out, "Report JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*phantom) {
            const PhantomSpec spec = phantom_from_json(read_json_file(phantom_spec));
            save_label_volume(generate_phantom(spec), phantom_out);
            std::cout << "wrote " << phantom_out << "\n";
            return kExitOk;
        }
        if (*simulate) return run_simulate(sim_args, std::nullopt);
        if (*baseline) return run_simulate(base_args, parse_render_mode(base_args.mode));
        if (*dataset) {
            const fs::path cfg_path = ds_config;
            const DatasetConfig cfg = dataset_config_from_json(read_json_file(cfg_path), cfg_path.parent_path());
            const DatasetResult r = generate_dataset(cfg, ds_out, ds_workers);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
            std::size_t train = 0;
            for (const auto& e : r.manifest) train += e.split == Split::train;
            std::cout << "wrote " << r.manifest.size() << " entries (" << train << " train / "
                      << r.manifest.size() - train << " val) to " << ds_out << "\n";
            return kExitOk;
        }
        if (*eval) {
            const DiameterReport report = evaluate_run(ev_pred, ev_gt, ev_spacing);
            const fs::path out = ev_out;
            write_text(out, report_to_json(report, fs::path(ev_pred).filename().string()) + "\n");
            const std::pair<std::string, DiameterReport> row{fs::path(ev_pred).filename().string(), report};
            const std::string table = report_table(std::span(&row, 1));
            fs::path table_path = out;
            table_path.replace_extension(".txt");
            write_text(table_path, table);
            std::cout << table << (clinically_acceptable(report) ? "clinically acceptable (MAE < 8 mm)\n"
                                                                 : "NOT clinically acceptable (MAE >= 8 mm)\n");
            return kExitOk;
        }
    } catch (const cactuss::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
