// SPDX-License-Identifier: Apache-2.0
/*
Copyright (C) 2026 The tracekit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.

*/

#include "tracekit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "json_config.hpp"
#include "tracekit/allocator_spec.hpp"
#include "tracekit/cache.hpp"
#include "tracekit/engine.hpp"
#include "tracekit/error.hpp"
#include "tracekit/kernels.hpp"
#include "tracekit/pipeline.hpp"
#include "tracekit/string_table.hpp"
#include "tracekit/text_codec.hpp"
#include "tracekit/transport.hpp"
#include "tracekit/workload.hpp"

namespace tracekit {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

struct InputOptions
{
	std::string in;
	std::string listen;
	std::string format = "binary";
};

struct Options
{
	std::string maps;

	struct
	{
		std::string scenario;
		std::string workload;
		std::vector<std::string> params;
		std::uint64_t seed = 0;
		std::string out;
		std::string connect;
		std::int64_t connect_wait = 0;
		std::string format = "binary";
		std::string allocators;
		std::size_t buffer = SinkConfig::kDefaultBufferEntries;
	} generate;

	struct
	{
		InputOptions input;
		std::string out;
		std::string connect;
		std::int64_t connect_wait = 0;
		std::uint64_t capacity = CacheConfig{}.capacity_bytes;
		std::uint64_t line = CacheConfig{}.line_bytes;
		std::string assoc = std::to_string(CacheConfig{}.associativity);
		std::size_t buffer = SinkConfig::kDefaultBufferEntries;
	} simulate;

	struct
	{
		std::string kernel;
		InputOptions input;
		std::string batch = "whole";
		std::vector<std::string> kernel_args;
		std::string report = "auto";
		std::string out;
		std::string chart_out;
	} analyze;

	struct
	{
		std::string in;
		std::string out;
	} decode;

	struct
	{
		std::string in;
		std::string out;
		std::size_t buffer = SinkConfig::kDefaultBufferEntries;
	} encode;

	struct
	{
		std::string in;
		std::string format = "binary";
		std::string connect;
		std::int64_t connect_wait = 0;
		std::size_t buffer = SinkConfig::kDefaultBufferEntries;
	} serve;
};

void add_input_options(CLI::App* sub, InputOptions& input, bool text_allowed)
{
	auto* in = sub->add_option("--in", input.in, "Read the trace from this file");
	auto* listen = sub->add_option("--listen", input.listen, "Accept one binary trace stream on host:port (port 0 picks a free port)");
	in->excludes(listen);
	if(text_allowed)
	{
		sub->add_option("--format", input.format, "Format of the --in file")
			->check(CLI::IsMember({"binary", "text"}))
			->capture_default_str();
	}
}

std::unique_ptr<CLI::App> build_app(Options& o)
{
	auto app = std::make_unique<CLI::App>("Memory access trace toolkit: generate, simulate, analyze and ship traces.", "tracekit");
	app->require_subcommand(1);
	app->config_formatter(std::make_shared<cli::JsonConfig>());
	app->set_config("--config", "", "Read option values from a JSON file");
	app->allow_config_extras(CLI::config_extras_mode::error);
	app->add_option("--string-maps", o.maps, "JSON file mapping string ids to file, function, variable and type names");
	app->fallthrough();

	auto* gen = app->add_subcommand("generate", "Run a synthetic workload and write its trace");
	gen->add_option("--scenario", o.generate.scenario, "Scenario name (see `tracekit scenarios`)");
	gen->add_option("--workload", o.generate.workload, "JSON workload file {\"scenario\", \"params\", \"seed\"}");
	gen->add_option("--param", o.generate.params, "Scenario parameter as key=value (repeatable)");
	gen->add_option("--seed", o.generate.seed, "RNG seed")->capture_default_str();
	auto* gen_out = gen->add_option("--out", o.generate.out, "Trace file to write");
	auto* gen_connect = gen->add_option("--connect", o.generate.connect, "Send the binary trace to a listener at host:port");
	gen_out->excludes(gen_connect);
	gen->add_option("--connect-wait", o.generate.connect_wait, "Milliseconds to keep retrying the initial connect")->capture_default_str();
	gen->add_option("--format", o.generate.format, "Trace format of --out")->check(CLI::IsMember({"binary", "text"}))->capture_default_str();
	gen->add_option("--allocators", o.generate.allocators, "Allocator description file (default: built-in malloc family)");
	gen->add_option("--buffer", o.generate.buffer, "Entries buffered before each flush")->check(CLI::PositiveNumber)->capture_default_str();

	auto* sim = app->add_subcommand("simulate", "Annotate accesses with simulated cache hits and misses");
	add_input_options(sim, o.simulate.input, false);
	auto* sim_out = sim->add_option("--out", o.simulate.out, "Annotated trace file to write");
	auto* sim_connect = sim->add_option("--connect", o.simulate.connect, "Send the annotated trace to a listener at host:port");
	sim_out->excludes(sim_connect);
	sim->add_option("--connect-wait", o.simulate.connect_wait, "Milliseconds to keep retrying the initial connect")->capture_default_str();
	sim->add_option("--capacity", o.simulate.capacity, "Cache capacity in bytes")->capture_default_str();
	sim->add_option("--line", o.simulate.line, "Cache line size in bytes")->capture_default_str();
	sim->add_option("--assoc", o.simulate.assoc, "Ways per set; 0 or \"full\" for fully associative")->capture_default_str();
	sim->add_option("--buffer", o.simulate.buffer, "Entries buffered before each flush")->check(CLI::PositiveNumber)->capture_default_str();

	auto* ana = app->add_subcommand("analyze", "Run an analysis kernel over a trace and print its report");
	ana->add_option("--kernel", o.analyze.kernel, "Kernel name (see `tracekit kernels`)")->required();
	add_input_options(ana, o.analyze.input, true);
	ana->add_option("--batch", o.analyze.batch, "Micro-batching: whole, count:N or duration:MS")->capture_default_str();
	ana->add_option("--kernel-arg", o.analyze.kernel_args, "Kernel argument as key=value (repeatable)");
	ana->add_option("--report", o.analyze.report, "Report format; auto picks json for shared_var_phase2, csv otherwise")
		->check(CLI::IsMember({"auto", "csv", "json"}))
		->capture_default_str();
	ana->add_option("--out", o.analyze.out, "Report file (default: standard output)");
	ana->add_option("--chart-out", o.analyze.chart_out, "Write the kernel's chart data (JSON) to this file");

	auto* dec = app->add_subcommand("decode", "Convert a binary trace to text");
	dec->add_option("--in", o.decode.in, "Binary trace file")->required();
	dec->add_option("--out", o.decode.out, "Text file (default: standard output)");

	auto* enc = app->add_subcommand("encode", "Convert a text trace to binary");
	enc->add_option("--in", o.encode.in, "Text trace file")->required();
	enc->add_option("--out", o.encode.out, "Binary trace file")->required();
	enc->add_option("--buffer", o.encode.buffer, "Entries buffered before each flush")->check(CLI::PositiveNumber)->capture_default_str();

	auto* srv = app->add_subcommand("serve", "Send a trace file to a listening stage");
	srv->add_option("--in", o.serve.in, "Trace file")->required();
	srv->add_option("--format", o.serve.format, "Format of the --in file")->check(CLI::IsMember({"binary", "text"}))->capture_default_str();
	srv->add_option("--connect", o.serve.connect, "Listener at host:port")->required();
	srv->add_option("--connect-wait", o.serve.connect_wait, "Milliseconds to keep retrying the initial connect")->capture_default_str();
	srv->add_option("--buffer", o.serve.buffer, "Entries buffered before each flush")->check(CLI::PositiveNumber)->capture_default_str();

	app->add_subcommand("scenarios", "List workload scenarios and their parameters");
	app->add_subcommand("kernels", "List analysis kernels and their arguments");
	app->add_subcommand("reference", "Print the command reference as Markdown");
	return app;
}

struct KernelDoc
{
	const char* name;
	const char* summary;
	const char* args;
};

constexpr KernelDoc kKernelDocs[] = {
	{"access_counter", "Accesses per variable", "none"},
	{"cache_offenders", "Misses and accesses per (variable, file, line); needs a simulated trace", "top=N (0 = all)"},
	{"shared_var_phase1", "Addresses touched uniformly by several threads, ranked by accesses", "writes_only=bool, top=N"},
	{"shared_var_phase2", "Source locations touching the shared target, with per-thread counts", "target=NAME | address=HEX[,HEX...] | top_k=N (default 1), writes_only=bool"},
	{"struct_splitting", "Hot/cold field classification of live record types", "live_threshold=F (default 0.01), hot_ratio=R (default 2.0)"},
};

StringTable load_maps(const Options& o)
{
	StringTable table;
	if(!o.maps.empty())
	{
		table = load_string_maps(o.maps);
	}
	return table;
}

std::chrono::milliseconds wait_of(std::int64_t ms)
{
	if(ms < 0)
	{
		throw UsageError("--connect-wait must not be negative");
	}
	return std::chrono::milliseconds(ms);
}

void write_text_file(const fs::path& path, const std::string& text)
{
	std::ofstream file(path, std::ios::binary | std::ios::trunc);
	if(!file)
	{
		fail(Errc::io_error, "cannot open " + path.string() + " for writing");
	}
	file << text;
	file.flush();
	if(!file)
	{
		fail(Errc::io_error, "write to " + path.string() + " failed");
	}
}

void emit(const std::string& path, const std::string& text, std::ostream& out)
{
	if(path.empty() || path == "-")
	{
		out << text;
		out.flush();
	}
	else
	{
		write_text_file(path, text);
	}
}

/// Source stage for --in/--listen, plus a relabel when the file is text.
void push_input(std::vector<std::unique_ptr<Stage>>& stages, const InputOptions& input, const StringTable& table, std::optional<TcpListener>& listener, std::ostream& err)
{
	if(input.in.empty() == input.listen.empty())
	{
		throw UsageError("exactly one of --in or --listen is required");
	}
	if(!input.listen.empty())
	{
		listener.emplace(TcpListener::bind(Endpoint::parse(input.listen)));
		err << "listening on " << listener->endpoint().to_string() << std::endl;
		stages.push_back(std::make_unique<SocketSourceStage>(*listener));
		return;
	}
	const TraceFormat format = parse_trace_format(input.format);
	stages.push_back(std::make_unique<FileSourceStage>(input.in, format, &table));
	if(format == TraceFormat::text)
	{
		stages.push_back(std::make_unique<ReformatStage>(StreamKind::text, StreamKind::binary));
	}
}

CacheConfig cache_config(const Options& o)
{
	CacheConfig cfg;
	cfg.capacity_bytes = o.simulate.capacity;
	cfg.line_bytes = o.simulate.line;
	if(o.simulate.assoc == "full")
	{
		cfg.associativity = CacheConfig::kFullyAssociative;
	}
	else
	{
		std::size_t used = 0;
		try
		{
			cfg.associativity = std::stoull(o.simulate.assoc, &used);
		}
		catch(const std::exception&)
		{
			used = 0;
		}
		if(o.simulate.assoc.empty() || used != o.simulate.assoc.size() || o.simulate.assoc[0] == '-')
		{
			throw UsageError("--assoc must be a non-negative integer or \"full\", got \"" + o.simulate.assoc + "\"");
		}
	}
	cfg.validate();
	return cfg;
}

int cmd_generate(const Options& o, std::ostream& err)
{
	const auto& g = o.generate;
	if(g.scenario.empty() == g.workload.empty())
	{
		throw UsageError("exactly one of --scenario or --workload is required");
	}
	if(g.out.empty() == g.connect.empty())
	{
		throw UsageError("exactly one of --out or --connect is required");
	}

	WorkloadSpec spec;
	if(!g.workload.empty())
	{
		std::ifstream file(g.workload);
		if(!file)
		{
			fail(Errc::io_error, "cannot open " + g.workload);
		}
		nlohmann::json doc;
		try
		{
			file >> doc;
		}
		catch(const nlohmann::json::exception& e)
		{
			fail(Errc::malformed_json, g.workload + ": " + e.what());
		}
		spec = workload_from_json(doc);
	}
	else
	{
		spec.scenario = g.scenario;
		spec.seed = g.seed;
	}
	for(const auto& kv : g.params)
	{
		const auto eq = kv.find('=');
		if(eq == std::string::npos || eq == 0)
		{
			throw UsageError("--param expects key=value, got \"" + kv + "\"");
		}
		std::int64_t value = 0;
		std::size_t used = 0;
		const std::string text = kv.substr(eq + 1);
		try
		{
			value = std::stoll(text, &used);
		}
		catch(const std::exception&)
		{
			used = 0;
		}
		if(text.empty() || used != text.size())
		{
			fail(Errc::invalid_spec, "parameter " + kv.substr(0, eq) + " must be an integer, got \"" + text + "\"");
		}
		spec.params[kv.substr(0, eq)] = value;
	}
	spec = resolve_workload(spec);

	const auto allocators = g.allocators.empty() ? parse_allocator_config(default_allocator_config()) : load_allocator_config(g.allocators);

	StringTable table;
	if(!o.maps.empty())
	{
		merge_string_maps(table, o.maps);
	}
	const auto entries = run_workload(spec, table, allocators);

	SinkConfig cfg;
	cfg.format = parse_trace_format(g.format);
	cfg.buffer_entries = g.buffer;
	cfg.table = &table;
	if(!g.connect.empty())
	{
		if(cfg.format != TraceFormat::binary)
		{
			throw UsageError("--connect sends binary traces only");
		}
		cfg.destination = Endpoint::parse(g.connect);
		cfg.connect_wait = wait_of(g.connect_wait);
	}
	else
	{
		cfg.destination = fs::path(g.out);
	}
	auto sink = open_sink(cfg);
	for(const auto& e : entries)
	{
		sink->write(e);
	}
	sink->close();

	if(!o.maps.empty())
	{
		save_string_maps(table, o.maps);
	}
	err << "generated " << entries.size() << " entries (" << spec.scenario << ", seed " << spec.seed << ")" << std::endl;
	return 0;
}

int cmd_simulate(const Options& o, std::ostream& err)
{
	const auto& s = o.simulate;
	if(s.out.empty() == s.connect.empty())
	{
		throw UsageError("exactly one of --out or --connect is required");
	}
	const CacheConfig cache = cache_config(o);

	SinkConfig sink;
	sink.buffer_entries = s.buffer;
	if(!s.connect.empty())
	{
		sink.destination = Endpoint::parse(s.connect);
		sink.connect_wait = wait_of(s.connect_wait);
	}
	else
	{
		sink.destination = fs::path(s.out);
	}

	const StringTable table;
	std::optional<TcpListener> listener;
	std::vector<std::unique_ptr<Stage>> stages;
	push_input(stages, s.input, table, listener, err);
	stages.push_back(std::make_unique<SimulateStage>(cache));
	stages.push_back(std::make_unique<SinkStage>(sink));
	Pipeline::chain(std::move(stages)).run();
	return 0;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err)
{
	const auto& a = o.analyze;
	const StringTable table = load_maps(o);
	auto kernel = make_kernel(a.kernel, table);

	KernelArgs args;
	for(const auto& kv : a.kernel_args)
	{
		add_kernel_arg(args, kv);
	}
	kernel->configure(args);
	const auto policy = BatchingPolicy::parse(a.batch);

	std::optional<TcpListener> listener;
	std::vector<std::unique_ptr<Stage>> stages;
	push_input(stages, a.input, table, listener, err);
	auto terminal = std::make_unique<KernelStage>(*kernel, policy);
	auto* stage = terminal.get();
	stages.push_back(std::move(terminal));
	auto pipeline = Pipeline::chain(std::move(stages));
	pipeline.run();

	const Report& report = *stage->report();
	std::string format = a.report;
	if(format == "auto")
	{
		format = a.kernel == SharedVarPhase2::kName ? "json" : "csv";
	}
	emit(a.out, format == "json" ? report.to_json_text() : report.to_csv(), out);

	if(!a.chart_out.empty())
	{
		if(!report.chart)
		{
			fail(Errc::config_error, "kernel " + a.kernel + " produces no chart data");
		}
		write_text_file(a.chart_out, report.chart->dump(2) + "\n");
	}
	return 0;
}

int cmd_decode(const Options& o, std::ostream& out)
{
	const StringTable table = load_maps(o);
	auto source = open_trace(o.decode.in, TraceFormat::binary);
	std::string text;
	std::size_t index = 0;
	while(auto e = source->next())
	{
		try
		{
			text += encode_text(*e, table);
		}
		catch(const Error& ex)
		{
			fail(ex.code(), "entry " + std::to_string(index) + ": " + ex.detail());
		}
		++index;
	}
	emit(o.decode.out, text, out);
	return 0;
}

int cmd_encode(const Options& o)
{
	const StringTable table = load_maps(o);
	auto source = open_trace(o.encode.in, TraceFormat::text, &table);
	SinkConfig cfg;
	cfg.destination = fs::path(o.encode.out);
	cfg.buffer_entries = o.encode.buffer;
	auto sink = open_sink(cfg);
	while(auto e = source->next())
	{
		sink->write(*e);
	}
	sink->close();
	return 0;
}

int cmd_serve(const Options& o, std::ostream& err)
{
	const auto& s = o.serve;
	const StringTable table = load_maps(o);
	auto source = open_trace(s.in, parse_trace_format(s.format), &table);
	const auto sent = serve_trace(*source, Endpoint::parse(s.connect), wait_of(s.connect_wait), s.buffer);
	err << "sent " << sent << " entries to " << s.connect << std::endl;
	return 0;
}

int cmd_scenarios(std::ostream& out)
{
	for(const auto& sc : scenario_catalog())
	{
		out << sc.name << "  " << sc.description << "\n";
		for(const auto& p : sc.params)
		{
			out << "  " << p.name << "=" << p.default_value << "  [" << p.min << ".." << p.max << "]  " << p.description << "\n";
		}
	}
	return 0;
}

int cmd_kernels(std::ostream& out)
{
	for(const auto& name : kernel_names())
	{
		out << name;
		for(const auto& doc : kKernelDocs)
		{
			if(name == doc.name)
			{
				out << "  " << doc.summary << "; arguments: " << doc.args;
			}
		}
		out << "\n";
	}
	return 0;
}

} // namespace

std::string cli_reference()
{
	Options o;
	auto app = build_app(o);
	std::ostringstream md;
	md << "# tracekit command reference\n\n";
	md << "Generated by `tracekit reference`.\n\n";
	md << "```\n" << app->help() << "```\n\n";
	for(const CLI::App* sub : app->get_subcommands({}))
	{
		md << "## " << sub->get_name() << "\n\n" << sub->get_description() << ".\n\n";
		md << "```\n" << sub->help() << "```\n\n";
	}
	md << "## Defaults\n\n";
	md << "| Setting | Default |\n|---|---|\n";
	md << "| Sink buffer | " << SinkConfig::kDefaultBufferEntries << " entries |\n";
	const CacheConfig cache;
	md << "| Cache capacity | " << cache.capacity_bytes << " bytes (16 MiB) |\n";
	md << "| Cache line | " << cache.line_bytes << " bytes |\n";
	md << "| Associativity | " << cache.associativity << " ways, LRU |\n";
	md << "| Batching | whole trace |\n\n";
	md << "## Kernels\n\n| Kernel | Output | Arguments |\n|---|---|---|\n";
	for(const auto& doc : kKernelDocs)
	{
		md << "| `" << doc.name << "` | " << doc.summary << " | " << doc.args << " |\n";
	}
	md << "\n## Scenarios\n\n";
	for(const auto& sc : scenario_catalog())
	{
		md << "### " << sc.name << "\n\n" << sc.description << "\n\n| Parameter | Default | Range | Meaning |\n|---|---|---|---|\n";
		for(const auto& p : sc.params)
		{
			md << "| `" << p.name << "` | " << p.default_value << " | " << p.min << "..." << p.max << " | " << p.description << " |\n";
		}
		md << "\n";
	}
	return md.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
	Options o;
	auto app = build_app(o);
	try
	{
		std::vector<std::string> reversed(args.rbegin(), args.rend());
		app->parse(reversed);
	}
	catch(const CLI::CallForHelp& e)
	{
		return app->exit(e, out, err);
	}
	catch(const CLI::CallForAllHelp& e)
	{
		return app->exit(e, out, err);
	}
	catch(const CLI::ParseError& e)
	{
		err << "error: " << e.what() << std::endl;
		return 2;
	}

	try
	{
		auto used = [&](const char* name) { return app->get_subcommand(name)->parsed(); };
		if(used("generate"))
		{
			return cmd_generate(o, err);
		}
		if(used("simulate"))
		{
			return cmd_simulate(o, err);
		}
		if(used("analyze"))
		{
			return cmd_analyze(o, out, err);
		}
		if(used("decode"))
		{
			return cmd_decode(o, out);
		}
		if(used("encode"))
		{
			return cmd_encode(o);
		}
		if(used("serve"))
		{
			return cmd_serve(o, err);
		}
		if(used("scenarios"))
		{
			return cmd_scenarios(out);
		}
		if(used("kernels"))
		{
			return cmd_kernels(out);
		}
		if(used("reference"))
		{
			out << cli_reference();
			return 0;
		}
	}
	catch(const UsageError& e)
	{
		err << "error: " << e.what() << std::endl;
		return 2;
	}
	catch(const std::exception& e)
	{
		std::string msg = e.what();
		std::replace(msg.begin(), msg.end(), '\n', ' ');
		err << "error: " << msg << std::endl;
		return 1;
	}
	err << "error: no subcommand" << std::endl;
	return 2;
}

} // namespace tracekit
