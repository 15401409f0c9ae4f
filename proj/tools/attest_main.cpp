// Copyright 2026 The attest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "attest/boot.hpp"
#include "attest/cel.hpp"
#include "attest/credential.hpp"
#include "attest/error.hpp"
#include "attest/provision.hpp"
#include "attest/service.hpp"
#include "attest/verifier.hpp"

namespace {

using namespace attest;

// Exit codes: 0 = attestation verdict pass, 1 = verdict fail,
// 2 = protocol / IO / configuration error.
constexpr int kExitPass = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitError = 2;

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

Bytes read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::io_error, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string s = buf.str();
  return Bytes(s.begin(), s.end());
}

void write_file_bytes(const std::filesystem::path& path, BytesView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(Errc::io_error, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) {
    raise(Errc::io_error, "short write to " + path.string());
  }
}

std::pair<std::string, std::uint16_t> parse_host_port(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos) {
    raise(Errc::bad_config, "expected host:port, got '" + s + "'");
  }
  int port = 0;
  try {
    port = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    raise(Errc::bad_config, "bad port in '" + s + "'");
  }
  if (port < 0 || port > 65535) {
    raise(Errc::bad_config, "port out of range in '" + s + "'");
  }
  return {s.substr(0, colon), static_cast<std::uint16_t>(port)};
}

struct Identity {
  std::string device_id;
  Bytes seed;
};

Identity load_identity(const std::filesystem::path& dir) {
  auto file = dir / "identity.json";
  if (!std::filesystem::exists(file)) {
    raise(Errc::bad_config,
          file.string() + " not found; run 'attest prover init' first");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(to_string(read_file_bytes(file)));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::bad_config, file.string() + ": " + e.what());
  }
  if (!doc.contains("device_id") || !doc.contains("seed")) {
    raise(Errc::bad_config, file.string() + " lacks device_id or seed");
  }
  return Identity{doc["device_id"].get<std::string>(),
                  from_hex(doc["seed"].get<std::string>())};
}

int cmd_prover_init(const std::filesystem::path& dir,
                    const std::string& device_id, const std::string& seed_hex) {
  Bytes seed = seed_hex.empty() ? crypto::random_bytes(32) : from_hex(seed_hex);
  std::filesystem::create_directories(dir / "creds");

  nlohmann::json doc;
  doc["device_id"] = device_id;
  doc["seed"] = to_hex(seed);
  write_file_bytes(dir / "identity.json", to_bytes(doc.dump(2) + "\n"));

  tpm::TpmDevice tpm;
  provision::DeviceCredentials dc =
      provision::issue_device_credentials(tpm, seed, device_id);
  struct Entry {
    const char* name;
    const cred::Credential* c;
  } entries[] = {
      {"root", &dc.root},       {"vendor_ca", &dc.vendor_ca},
      {"ek", &dc.ek},           {"platform", &dc.platform},
      {"platform_attributes", &dc.attrs}, {"ak", &dc.ak},
  };
  for (const Entry& e : entries) {
    write_file_bytes(dir / "creds" / (std::string(e.name) + ".cred"),
                     cred::encode_credential(*e.c));
  }
  std::cout << "identity written to " << dir << "\n"
            << "install " << (dir / "creds" / "root.cred")
            << " into the verifier's anchors directory" << std::endl;
  return kExitPass;
}

int cmd_prover_run(const std::filesystem::path& identity_dir,
                   const std::filesystem::path& manifest,
                   const std::filesystem::path& files_dir,
                   const std::string& verifier_addr,
                   const std::filesystem::path& psk_file,
                   const std::string& tamper_spec,
                   const std::filesystem::path& report_path, int timeout_ms) {
  Identity identity = load_identity(identity_dir);
  auto [host, port] = parse_host_port(verifier_addr);

  boot::BootImage image = boot::load_boot_manifest(manifest);
  std::vector<boot::MeasuredFile> files;
  if (!files_dir.empty()) {
    files = boot::collect_files(files_dir);
  }
  provision::ProverContext ctx = provision::make_prover_context(
      identity.seed, identity.device_id, image, files,
      service::load_psk_file(psk_file));

  service::AgentOptions options;
  options.timeout = std::chrono::milliseconds(timeout_ms);
  if (!tamper_spec.empty()) {
    auto colon = tamper_spec.find(':');
    if (colon == std::string::npos) {
      raise(Errc::bad_config, "--tamper expects <firmware|ima>:<recnum>");
    }
    std::string which = tamper_spec.substr(0, colon);
    cel::LogSource source;
    if (which == "firmware") {
      source = cel::LogSource::firmware;
    } else if (which == "ima") {
      source = cel::LogSource::ima;
    } else {
      raise(Errc::bad_config, "--tamper expects <firmware|ima>:<recnum>");
    }
    options.tamper = {source, std::stoull(tamper_spec.substr(colon + 1))};
  }

  service::AgentOutcome outcome =
      service::run_prover_agent(ctx, host, port, options);
  if (!outcome.completed()) {
    std::cerr << "verifier refused: "
              << outcome.nack_reason.value_or("connection dropped") << std::endl;
    return kExitError;
  }
  std::cout << outcome.verdict->render_text();
  if (!report_path.empty()) {
    write_file_bytes(report_path, to_bytes(outcome.verdict->to_json() + "\n"));
  }
  return outcome.verdict->overall() ? kExitPass : kExitVerdictFail;
}

int cmd_verifier_serve(const std::string& listen,
                       const std::filesystem::path& anchors_dir,
                       const std::filesystem::path& psk_file,
                       const std::filesystem::path& store_path,
                       double challenge_ttl, std::size_t pending_capacity,
                       int read_deadline_ms) {
  service::VerifierConfig config;
  std::tie(config.host, config.port) = parse_host_port(listen);
  config.anchors = service::load_anchor_dir(anchors_dir);
  config.psk = service::load_psk_file(psk_file);
  config.store_path = store_path;
  config.challenge_ttl_seconds = challenge_ttl;
  config.pending_capacity = pending_capacity;
  config.read_deadline = std::chrono::milliseconds(read_deadline_ms);
  config.session_log = &std::cout;

  service::VerifierService svc(std::move(config));
  svc.start();
  std::cout << "listening on " << listen.substr(0, listen.rfind(':')) << ":"
            << svc.port() << std::endl;

  struct sigaction sa {};
  sa.sa_handler = on_signal;
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  svc.stop();
  return kExitPass;
}

int cmd_log_inspect(const std::filesystem::path& path) {
  cel::Log log = cel::decode_log(read_file_bytes(path));
  for (const cel::Record& r : log.records) {
    std::cout << "record " << r.recnum << ": pcr=" << r.pcr_index;
    for (const cel::Digest& d : r.digests) {
      std::cout << (d.alg == cel::HashAlg::sha1 ? " sha1=" : " sha256=")
                << to_hex(d.value);
    }
    const char* type = r.content.type == cel::ContentType::pc_client_info
                           ? "pc-client-info"
                           : (r.content.type == cel::ContentType::firmware
                                  ? "firmware"
                                  : "ima");
    std::cout << " content=" << type << "(" << r.content.payload.size()
              << " bytes)" << std::endl;
  }
  return kExitPass;
}

int cmd_log_convert(const std::filesystem::path& in,
                    const std::filesystem::path& out) {
  Bytes data = read_file_bytes(in);
  // Binary logs open with a record tag byte 0x00; the debug form is text.
  if (!data.empty() && data[0] == 0x00) {
    cel::Log log = cel::decode_log(data);
    write_file_bytes(out, to_bytes(cel::to_debug_text(log)));
  } else {
    cel::Log log = cel::from_debug_text(to_string(data));
    write_file_bytes(out, cel::encode_log(log));
  }
  return kExitPass;
}

int cmd_cred_show(const std::filesystem::path& path) {
  cred::Credential c = cred::decode_credential(read_file_bytes(path));
  std::cout << "serial: " << c.serial << "\n"
            << "role: " << cred::role_name(c.role) << "\n"
            << "subject: " << c.subject << "\n"
            << "issuer_serial: " << c.issuer_serial
            << (c.self_signed() ? " (self-signed)" : "") << "\n"
            << "public_key: " << to_hex(c.public_key) << "\n";
  for (const auto& [key, value] : c.attributes) {
    std::cout << "attribute: " << key << "=" << value << "\n";
  }
  for (const cred::BoundRef& ref : c.bound_refs) {
    std::cout << "bound_ref: " << cred::role_name(ref.role) << " "
              << to_hex(cred::fingerprint_view(ref.fingerprint)) << "\n";
  }
  std::cout << "fingerprint: " << to_hex(cred::fingerprint_view(cred::fingerprint(c)))
            << "\n"
            << "signature: " << to_hex(c.signature) << std::endl;
  return kExitPass;
}

int cmd_boot_sim(const std::filesystem::path& manifest,
                 const std::filesystem::path& out,
                 const std::filesystem::path& ima_dir,
                 const std::filesystem::path& ima_out) {
  boot::BootImage image = boot::load_boot_manifest(manifest);
  tpm::TpmDevice tpm;
  cel::Log fw = boot::run_boot(image, tpm);
  if (!out.empty()) {
    write_file_bytes(out, cel::encode_log(fw));
  }
  if (!ima_dir.empty()) {
    std::vector<boot::MeasuredFile> files = boot::collect_files(ima_dir);
    cel::Log ima = boot::ima_measure(files, tpm);
    if (!ima_out.empty()) {
      write_file_bytes(ima_out, cel::encode_log(ima));
    }
  }
  const tpm::PcrBank& bank = tpm.bank(cel::HashAlg::sha256);
  for (std::uint32_t i = 0; i < cel::kPcrCount; ++i) {
    bool nonzero = false;
    for (std::uint8_t b : bank.values[i]) nonzero |= b != 0;
    if (nonzero) {
      std::cout << "pcr" << i << " sha256=" << to_hex(bank.values[i]) << "\n";
    }
  }
  std::cout << std::flush;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TPM 2.0 remote attestation toolkit (simulated devices)"};
  app.require_subcommand(1);

  // verifier serve
  auto* verifier_cmd = app.add_subcommand("verifier", "remote verifier");
  verifier_cmd->require_subcommand(1);
  auto* serve = verifier_cmd->add_subcommand("serve", "run the verifier service");
  std::string listen = "127.0.0.1:0";
  std::filesystem::path anchors_dir, psk_file, store_path;
  double challenge_ttl = 10.0;
  std::size_t pending_capacity = 1024;
  int read_deadline_ms = 10000;
  serve->add_option("--listen", listen, "host:port (port 0 = ephemeral)");
  serve->add_option("--anchors", anchors_dir, "directory of root .cred anchors")
      ->required();
  serve->add_option("--psk-file", psk_file, "pre-shared key file (raw bytes)")
      ->required();
  serve->add_option("--store", store_path, "enrollment store file")->required();
  serve->add_option("--challenge-ttl", challenge_ttl, "challenge TTL in seconds");
  serve->add_option("--pending-capacity", pending_capacity,
                    "max outstanding challenges");
  serve->add_option("--read-deadline-ms", read_deadline_ms,
                    "per-connection read deadline");

  // prover init
  auto* prover_cmd = app.add_subcommand("prover", "prover agent");
  prover_cmd->require_subcommand(1);
  auto* init = prover_cmd->add_subcommand("init", "create a device identity");
  std::filesystem::path init_dir;
  std::string init_device_id, init_seed;
  init->add_option("--identity", init_dir, "identity directory")->required();
  init->add_option("--device-id", init_device_id, "device identifier")->required();
  init->add_option("--seed", init_seed, "32-byte device seed, hex (default random)");

  // prover run
  auto* run = prover_cmd->add_subcommand(
      "run", "one provisioning + attestation run against a verifier");
  std::filesystem::path run_identity, run_manifest, run_files, run_psk, run_report;
  std::string run_verifier, run_tamper;
  int run_timeout_ms = 10000;
  run->add_option("--identity", run_identity, "identity directory")->required();
  run->add_option("--manifest", run_manifest, "boot image manifest")->required();
  run->add_option("--files", run_files, "directory of files to measure (IMA)");
  run->add_option("--verifier", run_verifier, "verifier host:port")->required();
  run->add_option("--psk-file", run_psk, "pre-shared key file")->required();
  run->add_option("--tamper", run_tamper,
                  "<firmware|ima>:<recnum> flip a digest byte in that record "
                  "before sending (for enrolled devices)");
  run->add_option("--report", run_report, "write the machine-readable verdict here");
  run->add_option("--timeout-ms", run_timeout_ms, "network timeout");

  // log inspect|convert
  auto* log_cmd = app.add_subcommand("log", "event log utilities");
  log_cmd->require_subcommand(1);
  auto* inspect = log_cmd->add_subcommand("inspect", "print records as text");
  std::filesystem::path inspect_path;
  inspect->add_option("path", inspect_path, "binary event log")->required();
  auto* convert = log_cmd->add_subcommand(
      "convert", "convert between binary and debug-hex forms (direction sniffed)");
  std::filesystem::path convert_in, convert_out;
  convert->add_option("in", convert_in, "input file")->required();
  convert->add_option("out", convert_out, "output file")->required();

  // cred show
  auto* cred_cmd = app.add_subcommand("cred", "credential utilities");
  cred_cmd->require_subcommand(1);
  auto* show = cred_cmd->add_subcommand("show", "render a .cred file");
  std::filesystem::path show_path;
  show->add_option("path", show_path, "credential file")->required();

  // boot-sim
  auto* boot_sim = app.add_subcommand("boot-sim", "run a measured boot from a manifest");
  std::filesystem::path sim_manifest, sim_out, sim_ima_dir, sim_ima_out;
  boot_sim->add_option("--manifest", sim_manifest, "boot image manifest")->required();
  boot_sim->add_option("--out", sim_out, "write the firmware CEL log here");
  boot_sim->add_option("--ima-dir", sim_ima_dir, "also measure this directory");
  boot_sim->add_option("--ima-out", sim_ima_out, "write the IMA CEL log here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    if (serve->parsed()) {
      return cmd_verifier_serve(listen, anchors_dir, psk_file, store_path,
                                challenge_ttl, pending_capacity,
                                read_deadline_ms);
    }
    if (init->parsed()) {
      return cmd_prover_init(init_dir, init_device_id, init_seed);
    }
    if (run->parsed()) {
      return cmd_prover_run(run_identity, run_manifest, run_files, run_verifier,
                            run_psk, run_tamper, run_report, run_timeout_ms);
    }
    if (inspect->parsed()) {
      return cmd_log_inspect(inspect_path);
    }
    if (convert->parsed()) {
      return cmd_log_convert(convert_in, convert_out);
    }
    if (show->parsed()) {
      return cmd_cred_show(show_path);
    }
    if (boot_sim->parsed()) {
      return cmd_boot_sim(sim_manifest, sim_out, sim_ima_dir, sim_ima_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitError;
  }
  return kExitError;
}
