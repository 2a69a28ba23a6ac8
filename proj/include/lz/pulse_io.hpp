#ifndef LZ_PULSE_IO_HPP
#define LZ_PULSE_IO_HPP

#include <string>

#include "lz/dynamics.hpp"

namespace lz {

/// Shortest text that still round-trips the double exactly is NOT what
/// we want here: output files fix floating-point text at 17
/// significant digits so identical runs produce identical bytes on any
/// libc.
std::string format_double(double x);

/// Pulse file schema: {"version": 1, "T": ..., "boundaries": [...],
/// "amplitudes": [...]}. The writer emits keys in that order with
/// 17-significant-digit numbers.
std::string pulse_to_json(const ControlPulse& pulse);

/// Parses the schema above (any key order); validates geometry and the
/// version field.
ControlPulse pulse_from_json(const std::string& text);

/// Whole-file helpers; both throw std::runtime_error on I/O failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace lz

#endif  // LZ_PULSE_IO_HPP
