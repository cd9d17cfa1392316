#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace coach::io {

// Called at every durability step of write_file_atomic with a short step
// name. Tests install a hook that aborts the process at a chosen step.
using FaultHook = std::function<void(std::string_view step)>;

std::string read_file(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

// Writes `<path>.tmp`, fsyncs it, renames it over `path`, then fsyncs the
// directory. Readers observe either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       const FaultHook& hook = {});

// Writes and fsyncs `path` without renaming (first half of a two-phase commit).
void write_file_durable(const std::filesystem::path& path, std::string_view content,
                        const FaultHook& hook = {});

void rename_durable(const std::filesystem::path& from, const std::filesystem::path& to,
                    const FaultHook& hook = {});

void fsync_directory(const std::filesystem::path& dir);

}  // namespace coach::io
