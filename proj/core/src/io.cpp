#include "coach/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "coach/error.hpp"

namespace coach::io {
namespace {

void step(const FaultHook& hook, std::string_view name) {
  if (hook) hook(name);
}

[[noreturn]] void fail(const std::string& what, const std::filesystem::path& p) {
  throw Error(ErrorCode::kIoError, what + " " + p.string() + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data, const std::filesystem::path& p) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("write", p);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  try {
    return nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

void write_file_durable(const std::filesystem::path& path, std::string_view content,
                        const FaultHook& hook) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail("open", path);
  // Split the write so a crash can leave a torn temp file behind.
  const std::size_t half = content.size() / 2;
  try {
    write_all(fd, content.substr(0, half), path);
    step(hook, "write-partial");
    write_all(fd, content.substr(half), path);
    if (::fsync(fd) != 0) fail("fsync", path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  step(hook, "write-synced");
}

void fsync_directory(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) fail("open directory", dir);
  ::fsync(fd);
  ::close(fd);
}

void rename_durable(const std::filesystem::path& from, const std::filesystem::path& to,
                    const FaultHook& hook) {
  step(hook, "before-rename");
  if (::rename(from.c_str(), to.c_str()) != 0) fail("rename", from);
  fsync_directory(to.parent_path().empty() ? std::filesystem::path(".") : to.parent_path());
  step(hook, "after-rename");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       const FaultHook& hook) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_file_durable(tmp, content, hook);
  rename_durable(tmp, path, hook);
}

}  // namespace coach::io
