#include "dialogtest/agent_adapter.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <iostream>
#include <mutex>
#include <thread>

#include "dialogtest/error.hpp"

extern char** environ;

namespace dialogtest {

namespace {

using Clock = std::chrono::steady_clock;

std::string next_session_id() {
  static std::atomic<unsigned long> counter{0};
  return "session-" + std::to_string(++counter);
}

class InProcessTransport final : public AgentSession::Transport {
 public:
  explicit InProcessTransport(InProcessAgent agent) : agent_(std::move(agent)) {}

  std::string respond(std::string_view user_text) override {
    try {
      return agent_.respond(user_text);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ProtocolViolation, std::string("agent threw: ") + e.what());
    }
  }

  StateDocument state() override {
    if (!agent_.state) throw Error(ErrorCode::StateUnsupported, "in-process agent has no state hook");
    return agent_.state();
  }

  void close() noexcept override {}

 private:
  InProcessAgent agent_;
};

// Owns a file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::LaunchFailure, std::string("pipe: ") + std::strerror(errno));
  }
  return Pipe{Fd(fds[0]), Fd(fds[1])};
}

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

enum class ReadStatus { Line, Timeout, Eof };

class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  ReadStatus read_line(std::string& line, Clock::time_point deadline) {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        line.assign(buffer_, 0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return ReadStatus::Line;
      }
      if (eof_) return ReadStatus::Eof;
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (remaining <= 0) return ReadStatus::Timeout;
      pollfd pfd{fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 1 << 30)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        eof_ = true;
        continue;
      }
      if (rc == 0) return ReadStatus::Timeout;
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        eof_ = true;
      } else if (n == 0) {
        eof_ = true;
      } else {
        buffer_.append(chunk, static_cast<std::size_t>(n));
      }
    }
  }

 private:
  int fd_;
  std::string buffer_;
  bool eof_ = false;
};

class SubprocessTransport final : public AgentSession::Transport {
 public:
  SubprocessTransport(const SubprocessAgent& agent, std::chrono::milliseconds timeout)
      : timeout_(timeout) {
    if (agent.argv.empty()) throw Error(ErrorCode::LaunchFailure, "empty command");
    ignore_sigpipe_once();
    Pipe to_child = make_pipe();
    Pipe from_child = make_pipe();

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child.read.get(), STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child.write.get(), STDOUT_FILENO);

    std::vector<char*> argv;
    argv.reserve(agent.argv.size() + 1);
    for (const auto& arg : agent.argv) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);

    const int rc = ::posix_spawnp(&pid_, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
      throw Error(ErrorCode::LaunchFailure, agent.argv[0] + ": " + std::strerror(rc));
    }
    // The child's ends must close here or EOF from a dead child never shows.
    to_child.read.reset();
    from_child.write.reset();
    to_child_ = std::move(to_child.write);
    from_child_ = std::move(from_child.read);
    reader_ = std::make_unique<LineReader>(from_child_.get());

    std::string line;
    switch (reader_->read_line(line, Clock::now() + timeout_)) {
      case ReadStatus::Timeout:
        close();
        throw Error(ErrorCode::HandshakeTimeout,
                    agent.argv[0] + " sent no READY within " + std::to_string(timeout_.count()) + " ms");
      case ReadStatus::Eof: {
        close();
        throw Error(ErrorCode::LaunchFailure, agent.argv[0] + " exited before READY" + exit_note());
      }
      case ReadStatus::Line:
        if (line != "READY") {
          close();
          throw Error(ErrorCode::ProtocolViolation, "expected READY, got '" + line + "'");
        }
        break;
    }
  }

  ~SubprocessTransport() override { close(); }

  std::string respond(std::string_view user_text) override {
    if (user_text.find('\n') != std::string_view::npos) {
      throw Error(ErrorCode::ProtocolViolation, "utterance contains a line feed");
    }
    write_line("U " + std::string(user_text));
    std::string line = read_reply();
    if (line == "A") return {};
    if (line.rfind("A ", 0) != 0) throw Error(ErrorCode::ProtocolViolation, line);
    return line.substr(2);
  }

  StateDocument state() override {
    write_line("Q");
    std::string line = read_reply();
    if (line == "S") return {};
    if (line.rfind("S ", 0) != 0) throw Error(ErrorCode::ProtocolViolation, line);
    return parse_state(std::string_view(line).substr(2));
  }

  void close() noexcept override {
    if (pid_ <= 0) return;
    if (to_child_.get() >= 0) {
      static constexpr char kBye[] = "BYE\n";
      [[maybe_unused]] auto n = ::write(to_child_.get(), kBye, sizeof kBye - 1);
      to_child_.reset();
    }
    const auto deadline = Clock::now() + std::chrono::seconds(2);
    int status = 0;
    for (;;) {
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || (r < 0 && errno != EINTR)) break;
      if (Clock::now() >= deadline) {
        std::clog << "dialogtest: agent pid " << pid_ << " ignored BYE; killing\n";
        ::kill(pid_, SIGKILL);
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    exit_status_ = status;
    pid_ = -1;
    from_child_.reset();
  }

 private:
  void write_line(const std::string& text) {
    std::string data = text + '\n';
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(to_child_.get(), data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::ProtocolViolation, "<eof>: agent stopped reading");
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_reply() {
    std::string line;
    switch (reader_->read_line(line, Clock::now() + timeout_)) {
      case ReadStatus::Timeout:
        throw Error(ErrorCode::ResponseTimeout,
                    "no reply within " + std::to_string(timeout_.count()) + " ms");
      case ReadStatus::Eof:
        throw Error(ErrorCode::ProtocolViolation, "<eof>: agent closed its output");
      case ReadStatus::Line:
        break;
    }
    return line;
  }

  std::string exit_note() const {
    if (WIFEXITED(exit_status_)) return " (exit status " + std::to_string(WEXITSTATUS(exit_status_)) + ")";
    if (WIFSIGNALED(exit_status_)) return " (signal " + std::to_string(WTERMSIG(exit_status_)) + ")";
    return {};
  }

  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int exit_status_ = 0;
  Fd to_child_;
  Fd from_child_;
  std::unique_ptr<LineReader> reader_;
};

}  // namespace

AgentSpec AgentSpec::in_process(std::function<std::string(std::string_view)> respond,
                                std::function<StateDocument()> state) {
  AgentSpec spec;
  spec.supports_state = static_cast<bool>(state);
  spec.entry = InProcessAgent{std::move(respond), std::move(state)};
  return spec;
}

AgentSpec AgentSpec::subprocess(std::string_view command_line, bool supports_state) {
  AgentSpec spec;
  spec.entry = SubprocessAgent{split_command_line(command_line)};
  spec.supports_state = supports_state;
  return spec;
}

std::vector<std::string> split_command_line(std::string_view command_line) {
  std::vector<std::string> words;
  std::string current;
  bool in_word = false;
  char quote = 0;
  for (std::size_t i = 0; i < command_line.size(); ++i) {
    const char c = command_line[i];
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else if (c == '\\' && quote == '"' && i + 1 < command_line.size()) {
        current += command_line[++i];
      } else {
        current += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == '\\' && i + 1 < command_line.size()) {
      current += command_line[++i];
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) words.push_back(std::move(current));
      current.clear();
      in_word = false;
    } else {
      current += c;
      in_word = true;
    }
  }
  if (quote) throw Error(ErrorCode::LaunchFailure, "unterminated quote in command line");
  if (in_word) words.push_back(std::move(current));
  return words;
}

AgentSession::AgentSession(std::unique_ptr<Transport> transport, const AgentSpec& spec,
                           std::size_t max_turns, std::string session_id)
    : transport_(std::move(transport)),
      supports_state_(spec.supports_state),
      max_turns_(max_turns),
      transcript_(std::move(session_id)) {}

AgentSession::AgentSession(AgentSession&&) noexcept = default;
AgentSession& AgentSession::operator=(AgentSession&&) noexcept = default;

AgentSession::~AgentSession() { close(); }

const Exchange& AgentSession::send(const Utterance& user) {
  if (!transport_) throw Error(ErrorCode::SessionClosed, transcript_.session_id());
  if (broken_) throw Error(ErrorCode::SessionClosed, broken_reason_);
  if (transcript_.size() >= max_turns_) {
    throw Error(ErrorCode::MaxTurnsExceeded, std::to_string(max_turns_) + " turns");
  }
  const auto start = Clock::now();
  std::string reply;
  try {
    reply = transport_->respond(user.raw());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ResponseTimeout || e.code() == ErrorCode::ProtocolViolation) {
      broken_ = true;
      broken_reason_ = std::string("aborted after ") + e.what();
    }
    throw;
  }
  const auto latency = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return transcript_.append(user, Utterance(std::move(reply)), latency);
}

StateDocument AgentSession::query_state() {
  if (!transport_) throw Error(ErrorCode::SessionClosed, transcript_.session_id());
  if (broken_) throw Error(ErrorCode::SessionClosed, broken_reason_);
  if (!supports_state_) throw Error(ErrorCode::StateUnsupported, "agent declares no state support");
  try {
    return transport_->state();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ResponseTimeout || e.code() == ErrorCode::ProtocolViolation) {
      broken_ = true;
      broken_reason_ = std::string("aborted after ") + e.what();
    }
    throw;
  }
}

const Transcript& AgentSession::close() noexcept {
  if (transport_) {
    transport_->close();
    transport_.reset();
  }
  return transcript_;
}

AgentSession open_session(const AgentSpec& spec, std::size_t max_turns) {
  std::unique_ptr<AgentSession::Transport> transport;
  if (const auto* in_process = std::get_if<InProcessAgent>(&spec.entry)) {
    if (!in_process->respond) throw Error(ErrorCode::LaunchFailure, "in-process agent has no callback");
    transport = std::make_unique<InProcessTransport>(*in_process);
  } else {
    transport = std::make_unique<SubprocessTransport>(std::get<SubprocessAgent>(spec.entry),
                                                      spec.response_timeout);
  }
  return AgentSession(std::move(transport), spec, max_turns, next_session_id());
}

}  // namespace dialogtest
