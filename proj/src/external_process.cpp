#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <unordered_set>

#include "rankstab/csv.hpp"
#include "rankstab/ranking.hpp"

namespace rankstab {

namespace {

void ignore_sigpipe_once() {
  static bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

// Shell out, writing `input` to the child's stdin while draining its stdout.
// Both pipes are serviced through poll so neither side can deadlock on a
// full pipe buffer.
ProcessResult run_process(const std::string& command, const std::string& input) {
  ignore_sigpipe_once();

  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    fail(errc::ranking, "external ranking: pipe() failed: " + std::string(std::strerror(errno)));
  }

  pid_t pid = ::fork();
  if (pid < 0) {
    fail(errc::ranking, "external ranking: fork() failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  int wfd = in_pipe[1];
  int rfd = out_pipe[0];
  ::fcntl(wfd, F_SETFL, O_NONBLOCK);

  std::string output;
  std::size_t written = 0;
  bool write_open = true;
  char buf[65536];

  while (true) {
    if (write_open && written == input.size()) {
      ::close(wfd);
      write_open = false;
    }
    struct pollfd fds[2];
    int nfds = 0;
    fds[nfds].fd = rfd;
    fds[nfds].events = POLLIN;
    ++nfds;
    if (write_open) {
      fds[nfds].fd = wfd;
      fds[nfds].events = POLLOUT;
      ++nfds;
    }
    if (::poll(fds, static_cast<nfds_t>(nfds), -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (fds[0].revents & (POLLIN | POLLHUP)) {
      ssize_t n = ::read(rfd, buf, sizeof(buf));
      if (n > 0) {
        output.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0) {
        break;  // child closed stdout
      } else if (errno != EAGAIN && errno != EINTR) {
        break;
      }
    }
    if (write_open && nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = ::write(wfd, input.data() + written, input.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        // child stopped reading; give up on the remaining input
        ::close(wfd);
        write_open = false;
      }
    }
  }
  if (write_open) ::close(wfd);
  ::close(rfd);

  int status = 0;
  if (::waitpid(pid, &status, 0) < 0) {
    fail(errc::ranking, "external ranking: waitpid() failed");
  }
  ProcessResult res;
  res.output = std::move(output);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return res;
}

Ranking rank_via_process(const std::string& command, const Dataset& d) {
  ProcessResult res = run_process(command, dataset_to_csv(d));
  if (res.exit_code != 0) {
    fail(errc::ranking, "external ranking: command exited with status " +
                            std::to_string(res.exit_code));
  }

  std::vector<std::string> order;
  order.reserve(static_cast<std::size_t>(d.size()));
  std::istringstream lines(res.output);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    order.push_back(line);
  }

  if (static_cast<int>(order.size()) != d.size()) {
    fail(errc::ranking, "external ranking: emitted " + std::to_string(order.size()) +
                            " ids for " + std::to_string(d.size()) + " tuples");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : order) {
    if (d.index_of(id) < 0) fail(errc::ranking, "external ranking: unknown id '" + id + "'");
    if (!seen.insert(id).second) fail(errc::ranking, "external ranking: repeated id '" + id + "'");
  }
  return Ranking::from_order(std::move(order));
}

}  // namespace rankstab
