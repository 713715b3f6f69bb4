#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "twomode/covariance.hpp"
#include "twomode/synthesis.hpp"

namespace twomode {

/// Trace file layout:
///
///   # mode=c
///   # eta=0.87
///   # n=100000
///   # seed=1234
///   # sweep_start=0
///   # sweep_end=6.283185307179586
///   # shotnoise_var=0.5
///   # electronic_noise_var=0.012559432157547897
///   # phase_jitter=0.02
///   0<TAB>0.4120318716302297
///   ...
///
/// Header keys appear in this order when written; on read, any order is
/// accepted, unknown keys are ignored and only `mode` is required. Numbers
/// are written with 17 significant digits and parsed locale-independently.
/// The shot-noise trace uses mode=vac.
void write_trace(std::ostream& out, const HomodyneTrace& trace);
void write_trace_file(const std::filesystem::path& path, const HomodyneTrace& trace);

/// Throws Error(ParseError) naming the source and line.
HomodyneTrace read_trace(std::istream& in, std::string_view source = "<stream>");
HomodyneTrace read_trace_file(const std::filesystem::path& path);

/// 16 numbers separated by whitespace and/or commas, row-major.
/// Throws ParseError, NotSymmetric or NotPositiveDefinite.
CovarianceMatrix parse_cm(std::string_view text);
std::string format_cm(const CovarianceMatrix& cm);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
/// Whole-string, locale-independent parse. Throws ParseError.
double parse_double(std::string_view text);

}  // namespace twomode
