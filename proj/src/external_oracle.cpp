#include "gpsearch/potentials.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace gpsearch {

namespace {

/// Owns a child process with pipes on its standard streams. One request line
/// out, one response line in, per evaluation.
class ChildProcess {
 public:
  ChildProcess(const std::string& command, int timeout_ms)
      : timeout_ms_(timeout_ms) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
      throw std::runtime_error("external oracle: pipe() failed");
    }
    pid_ = fork();
    if (pid_ < 0) {
      throw std::runtime_error("external oracle: fork() failed");
    }
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  ~ChildProcess() {
    if (write_fd_ >= 0) close(write_fd_);
    if (read_fd_ >= 0) close(read_fd_);
    if (pid_ > 0) {
      kill(pid_, SIGTERM);
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  void write_line(const std::string& line) {
    const char* data = line.data();
    size_t left = line.size();
    while (left > 0) {
      const ssize_t n = write(write_fd_, data, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(child_error("write to child failed"));
      }
      data += n;
      left -= static_cast<size_t>(n);
    }
  }

  std::string read_line() {
    std::string line;
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      struct pollfd pfd {
        read_fd_, POLLIN, 0
      };
      const int pr = poll(&pfd, 1, timeout_ms_);
      if (pr == 0) {
        throw std::runtime_error(child_error("timeout waiting for response"));
      }
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(child_error("poll failed"));
      }
      char chunk[4096];
      const ssize_t n = read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(child_error("read from child failed"));
      }
      if (n == 0) {
        throw std::runtime_error(child_error("child closed its output"));
      }
      buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

 private:
  std::string child_error(const std::string& what) {
    std::string msg = "external oracle: " + what;
    int status = 0;
    if (pid_ > 0 && waitpid(pid_, &status, WNOHANG) == pid_) {
      if (WIFEXITED(status)) {
        msg += " (child exited with status " +
               std::to_string(WEXITSTATUS(status)) + ")";
      } else if (WIFSIGNALED(status)) {
        msg += " (child killed by signal " + std::to_string(WTERMSIG(status)) + ")";
      }
      pid_ = -1;
    }
    return msg;
  }

  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

std::string format_request(const Vec& x) {
  std::ostringstream os;
  char num[64];
  os << "EVAL " << x.size();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(num, sizeof(num), " %.17g", x[i]);
    os << num;
  }
  os << "\n";
  return os.str();
}

EnergyGradient parse_response(const std::string& line, Eigen::Index dim) {
  std::istringstream is(line);
  std::string tag;
  is >> tag;
  if (tag == "ERR") {
    std::string rest;
    std::getline(is, rest);
    throw std::runtime_error("external oracle: child reported error:" + rest);
  }
  if (tag != "OK") {
    throw std::runtime_error("external oracle: malformed response line: \"" +
                             line + "\"");
  }
  EnergyGradient eg;
  eg.gradient.resize(dim);
  if (!(is >> eg.energy)) {
    throw std::runtime_error("external oracle: missing energy in: \"" + line + "\"");
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(is >> eg.gradient[i])) {
      throw std::runtime_error(
          "external oracle: truncated gradient in: \"" + line + "\"");
    }
  }
  double extra;
  if (is >> extra) {
    throw std::runtime_error(
        "external oracle: trailing fields in: \"" + line + "\"");
  }
  return eg;
}

}  // namespace

std::unique_ptr<Oracle> external_oracle(const std::string& command,
                                        int timeout_ms) {
  auto child = std::make_shared<ChildProcess>(command, timeout_ms);
  return std::make_unique<Oracle>([child](const Vec& x) {
    child->write_line(format_request(x));
    return parse_response(child->read_line(), x.size());
  });
}

}  // namespace gpsearch
