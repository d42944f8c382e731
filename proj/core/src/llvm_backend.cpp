// SPDX-License-Identifier: Apache-2.0
#include "passevo/llvm_backend.hpp"

#include "passevo/errors.hpp"
#include "passevo/subprocess.hpp"

#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace passevo {
namespace {

constexpr std::size_t stderr_attach_bytes = 4096;

std::atomic<std::uint64_t> g_eval_counter{0};

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

bool is_placeholder_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

// Placeholder names appearing in a template, or an error for malformed ones.
std::vector<std::string> scan_placeholders(const std::string& tmpl) {
    std::vector<std::string> names;
    std::size_t pos = 0;
    while ((pos = tmpl.find('{', pos)) != std::string::npos) {
        const std::size_t end = tmpl.find('}', pos + 1);
        if (end == std::string::npos) break;
        const std::string name = tmpl.substr(pos + 1, end - pos - 1);
        if (is_placeholder_name(name)) names.push_back(name);
        pos = end + 1;
    }
    return names;
}

struct StageResult {
    bool ok = false;
    std::string detail;
};

// One toolchain invocation with stderr captured next to the artifacts.
StageResult run_stage(const std::string& stage, const std::vector<std::string>& argv,
                      const fs::path& dir, double timeout_s) {
    const std::string err_path = (dir / (stage + ".stderr")).string();
    RunSpec spec;
    spec.argv = argv;
    spec.stderr_path = err_path;
    spec.timeout_s = timeout_s;

    const RunResult res = run_process(spec);
    StageResult out;
    if (res.timed_out) {
        out.detail = stage + ": timed out after " + std::to_string(timeout_s) + " s";
        return out;
    }
    if (res.spawn_failed) {
        out.detail = stage + ": " + res.error;
        return out;
    }
    if (res.exit_code != 0) {
        out.detail = stage + ": exit " + std::to_string(res.exit_code);
        const std::string head = read_file_head(err_path, stderr_attach_bytes);
        if (!head.empty()) out.detail += "\n" + head;
        return out;
    }
    out.ok = true;
    return out;
}

fs::path fresh_eval_dir(const std::string& workdir) {
    const std::uint64_t n = ++g_eval_counter;
    return fs::path(workdir) / ("eval-" + std::to_string(n));
}

CompileResult fail_compile(std::string eval_dir, std::string detail) {
    CompileResult r;
    r.status = MeasureStatus::CompileFailed;
    r.eval_dir = std::move(eval_dir);
    r.detail = std::move(detail);
    return r;
}

} // namespace

void apply_toolchain_preset(ToolchainConfig& tc, const std::string& preset) {
    if (preset != "legacy" && preset != "newpm")
        throw ConfigError("toolchain", "unknown preset '" + preset +
                                           "' (expected legacy or newpm)");

    tc.frontend_cmd = "clang -S -emit-llvm -O0 -Xclang -disable-O0-optnone {src} -o {out}";
    tc.backend_cmd = "clang {in} -o {out}";
    tc.baseline_cmd = "clang -{level} {src} -o {out}";
    tc.run_cmd = "{bin} {args}";
    if (preset == "legacy") {
        tc.opt_cmd = "opt -S {passes} {in} -o {out}";
        tc.passes_joiner = " ";
        tc.pass_prefix = "-";
    } else {
        tc.opt_cmd = "opt -S -passes={passes} {in} -o {out}";
        tc.passes_joiner = ",";
        tc.pass_prefix = "";
    }
}

void validate_toolchain(const ToolchainConfig& tc) {
    struct TemplateSpec {
        const char* name;
        const std::string* tmpl;
        std::vector<std::string> required;
    };
    const TemplateSpec specs[] = {
        {"frontend_cmd", &tc.frontend_cmd, {"src", "out"}},
        {"opt_cmd", &tc.opt_cmd, {"in", "out", "passes"}},
        {"backend_cmd", &tc.backend_cmd, {"in", "out"}},
        {"baseline_cmd", &tc.baseline_cmd, {"src", "out", "level"}},
        {"run_cmd", &tc.run_cmd, {"bin", "args"}},
    };

    for (const TemplateSpec& s : specs) {
        if (s.tmpl->empty()) throw ConfigError(s.name, "command template is empty");
        const std::vector<std::string> found = scan_placeholders(*s.tmpl);
        for (const std::string& req : s.required) {
            bool have = false;
            for (const std::string& f : found) have = have || f == req;
            if (!have)
                throw ConfigError(s.name, "template is missing required placeholder {" +
                                              req + "}");
        }
        for (const std::string& f : found) {
            bool known = false;
            for (const std::string& req : s.required) known = known || f == req;
            if (!known)
                throw ConfigError(s.name, "template uses unknown placeholder {" + f + "}");
        }
    }

    if (!(tc.timeout_s > 0.0)) throw ConfigError("timeout_s", "must be > 0");
    if (tc.passes_joiner.empty()) throw ConfigError("passes_joiner", "must be non-empty");
    for (const std::string& level : tc.levels)
        if (level.empty()) throw ConfigError("levels", "empty level token");
}

std::vector<std::string> expand_template(const std::string& tmpl,
                                         const std::map<std::string, std::string>& values) {
    std::vector<std::string> argv;
    for (const std::string& token : split_words(tmpl)) {
        if (token.size() > 2 && token.front() == '{' && token.back() == '}' &&
            is_placeholder_name(token.substr(1, token.size() - 2))) {
            const std::string name = token.substr(1, token.size() - 2);
            auto it = values.find(name);
            if (it == values.end())
                throw ConfigError("template", "unknown placeholder {" + name + "}");
            for (const std::string& word : split_words(it->second)) argv.push_back(word);
            continue;
        }

        std::string out;
        std::size_t pos = 0;
        while (pos < token.size()) {
            const std::size_t open = token.find('{', pos);
            if (open == std::string::npos) {
                out += token.substr(pos);
                break;
            }
            const std::size_t close = token.find('}', open + 1);
            const std::string name =
                close == std::string::npos ? "" : token.substr(open + 1, close - open - 1);
            if (!is_placeholder_name(name)) {
                out += token.substr(pos, open - pos + 1);
                pos = open + 1;
                continue;
            }
            auto it = values.find(name);
            if (it == values.end())
                throw ConfigError("template", "unknown placeholder {" + name + "}");
            out += token.substr(pos, open - pos);
            out += it->second;
            pos = close + 1;
        }
        argv.push_back(out);
    }
    return argv;
}

std::string join_passes(const std::vector<std::string>& seq, const ToolchainConfig& tc) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) out += tc.passes_joiner;
        out += tc.pass_prefix + seq[i];
    }
    return out;
}

CompileResult compile_with_sequence(const std::string& src,
                                    const std::vector<std::string>& seq,
                                    const ToolchainConfig& tc, const std::string& workdir) {
    const fs::path dir = fresh_eval_dir(workdir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        return fail_compile(dir.string(),
                            "cannot create " + dir.string() + ": " + ec.message());
    if (seq.empty()) return fail_compile(dir.string(), "empty pass sequence");

    const std::string ir = (dir / "ir.ll").string();
    const std::string opt = (dir / "opt.ll").string();
    const std::string exe = (dir / "a.out").string();

    StageResult st = run_stage(
        "frontend", expand_template(tc.frontend_cmd, {{"src", src}, {"out", ir}}), dir,
        tc.timeout_s);
    if (!st.ok) return fail_compile(dir.string(), st.detail);

    st = run_stage("opt",
                   expand_template(tc.opt_cmd, {{"in", ir},
                                                {"out", opt},
                                                {"passes", join_passes(seq, tc)}}),
                   dir, tc.timeout_s);
    if (!st.ok) return fail_compile(dir.string(), st.detail);

    st = run_stage("backend", expand_template(tc.backend_cmd, {{"in", opt}, {"out", exe}}),
                   dir, tc.timeout_s);
    if (!st.ok) return fail_compile(dir.string(), st.detail);

    CompileResult r;
    r.status = MeasureStatus::Ok;
    r.exe_path = exe;
    r.eval_dir = dir.string();
    return r;
}

CompileResult compile_baseline(const std::string& src, const std::string& level,
                               const ToolchainConfig& tc, const std::string& workdir) {
    const fs::path dir = fresh_eval_dir(workdir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        return fail_compile(dir.string(),
                            "cannot create " + dir.string() + ": " + ec.message());

    const std::string exe = (dir / "a.out").string();

    if (level.empty()) {
        const std::string ir = (dir / "ir.ll").string();
        StageResult st = run_stage(
            "frontend", expand_template(tc.frontend_cmd, {{"src", src}, {"out", ir}}), dir,
            tc.timeout_s);
        if (!st.ok) return fail_compile(dir.string(), st.detail);
        st = run_stage("backend",
                       expand_template(tc.backend_cmd, {{"in", ir}, {"out", exe}}), dir,
                       tc.timeout_s);
        if (!st.ok) return fail_compile(dir.string(), st.detail);
    } else {
        StageResult st = run_stage(
            "baseline",
            expand_template(tc.baseline_cmd, {{"src", src}, {"out", exe}, {"level", level}}),
            dir, tc.timeout_s);
        if (!st.ok) return fail_compile(dir.string(), st.detail);
    }

    CompileResult r;
    r.status = MeasureStatus::Ok;
    r.exe_path = exe;
    r.eval_dir = dir.string();
    return r;
}

FitnessRecord measure_runtime(const std::string& bin, const ToolchainConfig& tc,
                              std::size_t n,
                              const std::optional<std::string>& expected_stdout) {
    Measurement m;
    m.status = MeasureStatus::Ok;

    const fs::path dir = fs::path(bin).parent_path();
    const std::string out_path = (dir / "run.out").string();
    const std::string err_path = (dir / "run.err").string();

    RunSpec spec;
    spec.argv = expand_template(tc.run_cmd, {{"bin", bin}, {"args", tc.run_args}});
    spec.stdout_path = out_path;
    spec.stderr_path = err_path;
    spec.timeout_s = tc.timeout_s;

    for (std::size_t i = 0; i < n; ++i) {
        const RunResult res = run_process(spec);
        if (res.timed_out) {
            m.status = MeasureStatus::TimedOut;
            m.detail = "run " + std::to_string(i + 1) + ": timed out after " +
                       std::to_string(tc.timeout_s) + " s";
            break;
        }
        if (res.spawn_failed) {
            m.status = MeasureStatus::RunFailed;
            m.detail = "run " + std::to_string(i + 1) + ": " + res.error;
            break;
        }
        if (res.exit_code != 0) {
            m.status = MeasureStatus::RunFailed;
            m.detail = "run " + std::to_string(i + 1) + ": exit " +
                       std::to_string(res.exit_code);
            const std::string head = read_file_head(err_path, stderr_attach_bytes);
            if (!head.empty()) m.detail += "\n" + head;
            break;
        }
        if (expected_stdout &&
            read_file_head(out_path, expected_stdout->size() + 1) != *expected_stdout) {
            m.status = MeasureStatus::RunFailed;
            m.detail = "run " + std::to_string(i + 1) +
                       ": stdout differs from the unoptimized binary's";
            break;
        }
        m.samples.push_back(res.wall_seconds);
    }

    if (m.status != MeasureStatus::Ok) m.samples.clear();
    return record_from_measurement(m);
}

BaselineReport measure_baselines(const std::string& src, const ToolchainConfig& tc,
                                 std::size_t n, const std::string& workdir) {
    BaselineReport report;

    std::vector<std::string> labels;
    labels.push_back("unoptimized");
    labels.insert(labels.end(), tc.levels.begin(), tc.levels.end());

    for (const std::string& label : labels) {
        const bool unopt = label == "unoptimized";
        const CompileResult cr = compile_baseline(src, unopt ? "" : label, tc, workdir);
        FitnessRecord rec;
        if (cr.status != MeasureStatus::Ok) {
            rec.status = cr.status;
            rec.detail = cr.detail;
            rec.eval_count = 1;
        } else {
            rec = measure_runtime(cr.exe_path, tc, n);
        }
        report.entries.push_back({label, std::move(rec)});
    }
    return report;
}

LlvmBackend::LlvmBackend(ToolchainConfig tc, std::string target_src, std::string workdir,
                         bool check_output)
    : tc_(std::move(tc)), src_(std::move(target_src)), workdir_(std::move(workdir)),
      check_output_(check_output) {
    validate_toolchain(tc_);
}

Measurement LlvmBackend::measure(const std::vector<std::string>& sequence,
                                 std::size_t runs) {
    Measurement m;

    const CompileResult cr = compile_with_sequence(src_, sequence, tc_, workdir_);
    if (cr.status != MeasureStatus::Ok) {
        m.status = cr.status;
        m.detail = cr.detail;
        return m;
    }

    std::optional<std::string> expected;
    if (check_output_) {
        if (!reference_ready_) {
            reference_ready_ = true;
            const CompileResult ref = compile_baseline(src_, "", tc_, workdir_);
            if (ref.status != MeasureStatus::Ok) {
                reference_failed_ = true;
                reference_detail_ = ref.detail;
            } else {
                const FitnessRecord probe = measure_runtime(ref.exe_path, tc_, 1);
                if (!probe.ok()) {
                    reference_failed_ = true;
                    reference_detail_ = probe.detail;
                } else {
                    // 16 MiB cap on the reference output; larger targets are
                    // out of scope for byte comparison.
                    reference_stdout_ = read_file_head(
                        (fs::path(ref.exe_path).parent_path() / "run.out").string(),
                        std::size_t{16} << 20);
                }
            }
        }
        if (reference_failed_) {
            m.status = MeasureStatus::RunFailed;
            m.detail = "unoptimized reference binary unavailable: " + reference_detail_;
            return m;
        }
        expected = reference_stdout_;
    }

    const FitnessRecord rec = measure_runtime(cr.exe_path, tc_, runs, expected);
    m.status = rec.status;
    m.samples = rec.samples;
    m.detail = rec.detail;
    return m;
}

} // namespace passevo
