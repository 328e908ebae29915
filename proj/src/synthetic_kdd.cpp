#include "wsnids/synthetic_kdd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wsnids/random.hpp"

namespace wsnids::data {

namespace {

struct Connection {
  double duration = 0;
  std::string_view protocol = "tcp";
  std::string_view service = "http";
  std::string_view flag = "SF";
  double src_bytes = 0;
  double dst_bytes = 0;
  int land = 0;
  int wrong_fragment = 0;
  int hot = 0;
  int failed_logins = 0;
  int logged_in = 0;
  int compromised = 0;
  int root_shell = 0;
  int file_creations = 0;
  int guest_login = 0;
  double count = 1;
  double srv_count = 1;
  double serror_rate = 0;
  double rerror_rate = 0;
  double same_srv_rate = 1;
  double diff_srv_rate = 0;
  double srv_diff_host_rate = 0;
  double dst_host_count = 255;
  double dst_host_srv_count = 255;
  double dst_host_same_srv_rate = 1;
  double dst_host_diff_srv_rate = 0;
  double dst_host_same_src_port_rate = 0;
  double dst_host_srv_diff_host_rate = 0;
  std::string_view label = "normal";
};

double rate(rng::Engine& e, double lo, double hi) {
  return std::round(rng::uniform(e, lo, hi) * 100.0) / 100.0;
}

double bytes(rng::Engine& e, double median, double log_sd, double cap = 2e6) {
  return std::min(cap, std::round(rng::lognormal(e, median, log_sd)));
}

using Generator = Connection (*)(rng::Engine&);

struct Mode {
  double weight;
  Generator make;
};

// Normal traffic, by service.

Connection normal_http(rng::Engine& e) {
  Connection c;
  c.src_bytes = bytes(e, 240, 0.3);
  c.dst_bytes = bytes(e, 2500, 1.0);
  c.logged_in = 1;
  c.count = static_cast<double>(rng::integer(e, 1, 16));
  c.srv_count = c.count + static_cast<double>(rng::integer(e, 0, 12));
  c.srv_diff_host_rate = rng::bernoulli(e, 0.4) ? 0.0 : rate(e, 0.0, 0.3);
  c.dst_host_count = static_cast<double>(rng::integer(e, 5, 255));
  c.dst_host_srv_count = 255;
  c.dst_host_same_src_port_rate = rate(e, 0.0, 0.1);
  c.dst_host_srv_diff_host_rate = rate(e, 0.0, 0.1);
  return c;
}

Connection normal_smtp(rng::Engine& e) {
  Connection c;
  c.service = "smtp";
  c.duration = rng::bernoulli(e, 0.7) ? 0.0 : static_cast<double>(rng::integer(e, 1, 5));
  c.src_bytes = bytes(e, 1100, 0.5);
  c.dst_bytes = bytes(e, 330, 0.1);
  c.logged_in = 1;
  c.count = static_cast<double>(rng::integer(e, 1, 4));
  c.srv_count = c.count;
  c.srv_diff_host_rate = rng::bernoulli(e, 0.5) ? 0.0 : rate(e, 0.0, 0.67);
  c.dst_host_count = static_cast<double>(rng::integer(e, 10, 255));
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 50, 200));
  c.dst_host_same_srv_rate = rate(e, 0.4, 0.9);
  return c;
}

Connection normal_ftp_data(rng::Engine& e) {
  Connection c;
  c.service = "ftp_data";
  c.src_bytes = bytes(e, 2200, 0.9);
  c.dst_bytes = 0;
  c.count = static_cast<double>(rng::integer(e, 1, 8));
  c.srv_count = c.count;
  c.srv_diff_host_rate = rng::bernoulli(e, 0.6) ? 0.0 : rate(e, 0.0, 0.4);
  c.dst_host_count = static_cast<double>(rng::integer(e, 1, 255));
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 120));
  c.dst_host_same_src_port_rate = rate(e, 0.0, 1.0);
  return c;
}

Connection normal_domain(rng::Engine& e) {
  Connection c;
  c.protocol = "udp";
  c.service = "domain_u";
  c.src_bytes = static_cast<double>(rng::integer(e, 28, 48));
  c.dst_bytes = static_cast<double>(rng::integer(e, 40, 180));
  c.count = static_cast<double>(rng::integer(e, 1, 60));
  c.srv_count = c.count;
  c.srv_diff_host_rate = rng::bernoulli(e, 0.85) ? 0.0 : rate(e, 0.0, 0.05);
  c.dst_host_count = static_cast<double>(rng::integer(e, 50, 255));
  return c;
}

Connection normal_ping(rng::Engine& e) {
  Connection c;
  c.protocol = "icmp";
  c.service = "ecr_i";
  c.src_bytes = static_cast<double>(rng::integer(e, 30, 300));
  c.dst_bytes = 0;
  c.count = static_cast<double>(rng::integer(e, 1, 3));
  c.srv_count = c.count;
  c.srv_diff_host_rate = rng::bernoulli(e, 0.8) ? 0.0 : rate(e, 0.0, 1.0);
  c.dst_host_count = static_cast<double>(rng::integer(e, 1, 60));
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 60));
  return c;
}

Connection normal_interactive(rng::Engine& e) {
  Connection c;
  c.service = rng::bernoulli(e, 0.5) ? "telnet" : "ftp";
  c.duration = static_cast<double>(rng::integer(e, 1, 3000));
  c.src_bytes = bytes(e, 400, 1.0);
  c.dst_bytes = bytes(e, 3000, 1.2);
  c.logged_in = 1;
  c.hot = static_cast<int>(rng::integer(e, 0, 3));
  c.count = static_cast<double>(rng::integer(e, 1, 3));
  c.srv_count = c.count;
  c.dst_host_count = static_cast<double>(rng::integer(e, 1, 100));
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 40));
  return c;
}

// Denial of service.

Connection dos_smurf(rng::Engine& e) {
  Connection c;
  c.protocol = "icmp";
  c.service = "ecr_i";
  c.src_bytes = rng::bernoulli(e, 0.8) ? 1032 : 520;
  c.count = rng::bernoulli(e, 0.85) ? 511 : static_cast<double>(rng::integer(e, 120, 510));
  c.srv_count = c.count;
  c.label = "smurf";
  return c;
}

Connection dos_neptune(rng::Engine& e) {
  Connection c;
  c.service = "private";
  c.flag = "S0";
  c.count = static_cast<double>(rng::integer(e, 90, 300));
  c.srv_count = static_cast<double>(rng::integer(e, 1, 25));
  c.serror_rate = 1.0;
  c.same_srv_rate = rate(e, 0.0, 0.1);
  c.diff_srv_rate = rate(e, 0.05, 0.08);
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 25));
  c.dst_host_same_srv_rate = rate(e, 0.0, 0.1);
  c.label = "neptune";
  return c;
}

Connection dos_back(rng::Engine& e) {
  Connection c;
  c.src_bytes = 54540;
  c.dst_bytes = static_cast<double>(rng::integer(e, 7300, 8314));
  c.logged_in = 1;
  c.hot = 2;
  c.count = static_cast<double>(rng::integer(e, 1, 10));
  c.srv_count = c.count;
  c.srv_diff_host_rate = rng::bernoulli(e, 0.8) ? 0.0 : rate(e, 0.0, 0.1);
  c.label = "back";
  return c;
}

Connection dos_teardrop(rng::Engine& e) {
  Connection c;
  c.protocol = "udp";
  c.service = "private";
  c.src_bytes = 28;
  c.wrong_fragment = 3;
  c.count = static_cast<double>(rng::integer(e, 40, 160));
  c.srv_count = c.count;
  c.label = "teardrop";
  return c;
}

Connection dos_pod(rng::Engine& e) {
  Connection c;
  c.protocol = "icmp";
  c.service = "ecr_i";
  c.src_bytes = 1480;
  c.wrong_fragment = 1;
  c.count = static_cast<double>(rng::integer(e, 1, 6));
  c.srv_count = c.count;
  c.label = "pod";
  return c;
}

Connection dos_land(rng::Engine& e) {
  Connection c;
  c.service = "finger";
  c.flag = "S0";
  c.land = 1;
  c.count = static_cast<double>(rng::integer(e, 1, 2));
  c.srv_count = c.count;
  c.serror_rate = 1.0;
  c.label = "land";
  return c;
}

// Probing.

Connection probe_ipsweep(rng::Engine& e) {
  Connection c;
  c.protocol = "icmp";
  c.service = "eco_i";
  c.src_bytes = rng::bernoulli(e, 0.5) ? 8 : 18;
  c.count = static_cast<double>(rng::integer(e, 1, 3));
  c.srv_count = static_cast<double>(rng::integer(e, 1, 40));
  c.srv_diff_host_rate = rate(e, 0.5, 1.0);
  c.dst_host_count = static_cast<double>(rng::integer(e, 1, 80));
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 80));
  c.dst_host_srv_diff_host_rate = rate(e, 0.3, 1.0);
  c.label = "ipsweep";
  return c;
}

Connection probe_portsweep(rng::Engine& e) {
  Connection c;
  c.service = "private";
  c.flag = rng::bernoulli(e, 0.7) ? "REJ" : "RSTR";
  c.duration = rng::bernoulli(e, 0.8) ? 0.0 : static_cast<double>(rng::integer(e, 1, 20000));
  c.src_bytes = static_cast<double>(rng::integer(e, 0, 1));
  c.count = static_cast<double>(rng::integer(e, 1, 3));
  c.srv_count = static_cast<double>(rng::integer(e, 1, 2));
  c.rerror_rate = rate(e, 0.5, 1.0);
  c.srv_diff_host_rate = rate(e, 0.0, 1.0);
  c.dst_host_count = static_cast<double>(rng::integer(e, 1, 255));
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 10));
  c.dst_host_diff_srv_rate = rate(e, 0.5, 1.0);
  c.label = "portsweep";
  return c;
}

Connection probe_satan(rng::Engine& e) {
  Connection c;
  c.service = "private";
  c.flag = "REJ";
  c.src_bytes = static_cast<double>(rng::integer(e, 0, 5));
  c.count = static_cast<double>(rng::integer(e, 1, 500));
  c.srv_count = static_cast<double>(rng::integer(e, 1, 10));
  c.rerror_rate = rate(e, 0.6, 1.0);
  c.same_srv_rate = rate(e, 0.0, 0.2);
  c.diff_srv_rate = rate(e, 0.5, 1.0);
  c.srv_diff_host_rate = rng::bernoulli(e, 0.5) ? 0.0 : rate(e, 0.0, 1.0);
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 10));
  c.dst_host_diff_srv_rate = rate(e, 0.4, 1.0);
  c.label = "satan";
  return c;
}

Connection probe_nmap(rng::Engine& e) {
  Connection c;
  c.protocol = rng::bernoulli(e, 0.5) ? "tcp" : "icmp";
  c.service = "private";
  c.flag = "SH";
  c.src_bytes = static_cast<double>(rng::integer(e, 0, 20));
  c.count = static_cast<double>(rng::integer(e, 1, 5));
  c.srv_count = c.count;
  c.srv_diff_host_rate = rate(e, 0.0, 1.0);
  c.dst_host_count = static_cast<double>(rng::integer(e, 1, 255));
  c.dst_host_srv_count = static_cast<double>(rng::integer(e, 1, 5));
  c.label = "nmap";
  return c;
}

// User-to-root and remote-to-local; present only so the label table and
// exclusion rule see realistic input.

Connection u2r_buffer_overflow(rng::Engine& e) {
  Connection c;
  c.service = "telnet";
  c.duration = static_cast<double>(rng::integer(e, 20, 300));
  c.src_bytes = bytes(e, 1500, 0.5);
  c.dst_bytes = bytes(e, 4000, 0.5);
  c.logged_in = 1;
  c.hot = static_cast<int>(rng::integer(e, 1, 6));
  c.root_shell = 1;
  c.file_creations = static_cast<int>(rng::integer(e, 0, 2));
  c.label = rng::bernoulli(e, 0.6) ? "buffer_overflow" : "rootkit";
  return c;
}

Connection r2l_guess(rng::Engine& e) {
  Connection c;
  c.service = rng::bernoulli(e, 0.5) ? "ftp" : "telnet";
  c.src_bytes = bytes(e, 300, 0.6);
  c.dst_bytes = bytes(e, 2000, 1.0);
  c.failed_logins = rng::bernoulli(e, 0.5) ? 1 : 0;
  c.guest_login = rng::bernoulli(e, 0.5) ? 1 : 0;
  c.hot = static_cast<int>(rng::integer(e, 0, 28));
  c.label = c.failed_logins != 0 ? "guess_passwd" : "warezclient";
  return c;
}

const std::array<Mode, 6> kNormalModes = {{{0.50, normal_http},
                                           {0.12, normal_smtp},
                                           {0.12, normal_ftp_data},
                                           {0.14, normal_domain},
                                           {0.04, normal_ping},
                                           {0.08, normal_interactive}}};
const std::array<Mode, 6> kDosModes = {{{0.55, dos_smurf},
                                        {0.38, dos_neptune},
                                        {0.04, dos_back},
                                        {0.02, dos_teardrop},
                                        {0.007, dos_pod},
                                        {0.003, dos_land}}};
const std::array<Mode, 4> kProbeModes = {{{0.30, probe_ipsweep},
                                          {0.25, probe_portsweep},
                                          {0.39, probe_satan},
                                          {0.06, probe_nmap}}};
const std::array<Mode, 1> kU2rModes = {{{1.0, u2r_buffer_overflow}}};
const std::array<Mode, 1> kR2lModes = {{{1.0, r2l_guess}}};

template <std::size_t K>
Connection draw(const std::array<Mode, K>& modes, rng::Engine& e) {
  double total = 0;
  for (const auto& m : modes) total += m.weight;
  double u = rng::uniform01(e) * total;
  for (const auto& m : modes) {
    if (u < m.weight) return m.make(e);
    u -= m.weight;
  }
  return modes.back().make(e);
}

void write_number(std::ostream& out, double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    out << static_cast<long long>(v);
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    out << buf;
  }
}

void write_rate(std::ostream& out, double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  out << buf;
}

void write_line(std::ostream& out, const Connection& c) {
  write_number(out, c.duration);
  out << ',' << c.protocol << ',' << c.service << ',' << c.flag << ',';
  write_number(out, c.src_bytes);
  out << ',';
  write_number(out, c.dst_bytes);
  out << ',' << c.land << ',' << c.wrong_fragment << ",0," << c.hot << ',' << c.failed_logins << ','
      << c.logged_in << ',' << c.compromised << ',' << c.root_shell << ",0,0," << c.file_creations
      << ",0,0,0,0," << c.guest_login << ',';
  write_number(out, c.count);
  out << ',';
  write_number(out, c.srv_count);
  for (double r : {c.serror_rate, c.serror_rate, c.rerror_rate, c.rerror_rate, c.same_srv_rate,
                   c.diff_srv_rate, c.srv_diff_host_rate}) {
    out << ',';
    write_rate(out, r);
  }
  out << ',';
  write_number(out, c.dst_host_count);
  out << ',';
  write_number(out, c.dst_host_srv_count);
  for (double r : {c.dst_host_same_srv_rate, c.dst_host_diff_srv_rate, c.dst_host_same_src_port_rate,
                   c.dst_host_srv_diff_host_rate, c.serror_rate, c.serror_rate, c.rerror_rate,
                   c.rerror_rate}) {
    out << ',';
    write_rate(out, r);
  }
  out << ',' << c.label << ".\n";
}

}  // namespace

void write_synthetic_kdd(std::ostream& out, const SyntheticKddOptions& options) {
  const std::array<double, 5> shares = {options.normal_share, options.dos_share, options.probe_share,
                                        options.u2r_share, options.r2l_share};
  double total = 0;
  for (double s : shares) total += std::max(0.0, s);
  rng::Engine e(rng::mix(options.seed, 0x6b6464));
  for (std::size_t i = 0; i < options.records; ++i) {
    double u = rng::uniform01(e) * total;
    std::size_t cls = 0;
    while (cls + 1 < shares.size() && u >= std::max(0.0, shares[cls])) {
      u -= std::max(0.0, shares[cls]);
      ++cls;
    }
    Connection c;
    switch (cls) {
      case 0:
        c = draw(kNormalModes, e);
        break;
      case 1:
        c = draw(kDosModes, e);
        break;
      case 2:
        c = draw(kProbeModes, e);
        break;
      case 3:
        c = draw(kU2rModes, e);
        break;
      default:
        c = draw(kR2lModes, e);
        break;
    }
    write_line(out, c);
  }
}

}  // namespace wsnids::data
