#include "proofsmith/subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

namespace proofsmith {

RunResult run_process(const std::vector<std::string> &argv,
                      int timeout_seconds) {
  RunResult res;
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    res.launch_failed = true;
    res.err = "pipe() failed";
    return res;
  }

  std::vector<char *> cargv;
  for (const auto &a : argv)
    cargv.push_back(const_cast<char *>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) {
    res.launch_failed = true;
    res.err = "fork() failed";
    return res;
  }
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    execvp(cargv[0], cargv.data());
    // exec failed; 127 mirrors the shell convention
    const char *msg = "exec failed: ";
    ssize_t ignored = write(STDERR_FILENO, msg, strlen(msg));
    ignored = write(STDERR_FILENO, cargv[0], strlen(cargv[0]));
    (void)ignored;
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::seconds(timeout_seconds > 0 ? timeout_seconds
                                                           : 1000000);
  bool out_open = true, err_open = true;
  int status = 0;
  bool exited = false;
  char buf[4096];

  auto drain = [&](int fd, std::string &sink, bool &open_flag) {
    for (;;) {
      ssize_t n = read(fd, buf, sizeof buf);
      if (n > 0) {
        sink.append(buf, static_cast<size_t>(n));
      } else if (n == 0) {
        open_flag = false;
        return;
      } else {
        return; // EAGAIN or error
      }
    }
  };

  while (!exited || out_open || err_open) {
    if (!exited) {
      pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid)
        exited = true;
    }
    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open)
      fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open)
      fds[nfds++] = {err_pipe[0], POLLIN, 0};
    if (nfds > 0)
      poll(fds, nfds, 50);
    if (out_open)
      drain(out_pipe[0], res.out, out_open);
    if (err_open)
      drain(err_pipe[0], res.err, err_open);
    if (!exited && std::chrono::steady_clock::now() > deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      res.timed_out = true;
      exited = true;
    }
    if (exited && !out_open && !err_open)
      break;
    if (exited) {
      // one more drain then close anything that is still open
      drain(out_pipe[0], res.out, out_open);
      drain(err_pipe[0], res.err, err_open);
      break;
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  if (WIFEXITED(status))
    res.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    res.exit_code = 128 + WTERMSIG(status);
  if (res.exit_code == 127 && res.err.find("exec failed:") != std::string::npos)
    res.launch_failed = true;
  return res;
}

} // namespace proofsmith
