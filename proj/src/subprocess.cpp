#include "s3forge/subprocess.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "s3forge/errors.hpp"

namespace s3forge {

LineProcess::LineProcess(const std::string& command) {
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw AdapterError("pipe() failed: " + std::string(std::strerror(errno)));

    pid_ = fork();
    if (pid_ < 0) throw AdapterError("fork() failed");
    if (pid_ == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

LineProcess::~LineProcess() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == 0) {
            kill(pid_, SIGTERM);
            waitpid(pid_, &status, 0);
        }
    }
}

bool LineProcess::alive() const {
    if (pid_ <= 0) return false;
    int status = 0;
    return waitpid(pid_, &status, WNOHANG) == 0;
}

std::string LineProcess::round_trip(const std::string& line, int timeout_ms) {
    std::string msg = line;
    msg.push_back('\n');
    std::size_t written = 0;
    while (written < msg.size()) {
        const ssize_t n = write(to_child_, msg.data() + written, msg.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw AdapterError("write to adapter process failed: " +
                               std::string(std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }

    for (;;) {
        const std::size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string out = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return out;
        }
        struct pollfd pfd{from_child_, POLLIN, 0};
        const int rc = poll(&pfd, 1, timeout_ms);
        if (rc == 0) throw AdapterError("adapter process response timed out");
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw AdapterError("poll on adapter process failed");
        }
        char chunk[4096];
        const ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n <= 0) throw AdapterError("adapter process closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace s3forge
