#include "newsprop/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace newsprop {
namespace {

// Bundled English stopword list. Must stay byte-identical to
// data/stopwords_en.txt (a unit test enforces the pairing); the file exists
// so runs can point other tools at the exact list a result was produced with.
// Single-letter fragments ("s", "t", "d" from split contractions) are not
// listed because the tokenizer already drops tokens shorter than 2.
const char kStopwordsRaw[] = R"(a
about
above
after
again
against
ain
all
am
an
and
any
are
aren
as
at
be
because
been
before
being
below
between
both
but
by
can
couldn
did
didn
do
does
doesn
doing
don
down
during
each
few
for
from
further
had
hadn
has
hasn
have
haven
having
he
her
here
hers
herself
him
himself
his
how
if
in
into
is
isn
it
its
itself
just
ll
ma
me
mightn
more
most
mustn
my
myself
needn
no
nor
not
now
of
off
on
once
only
or
other
our
ours
ourselves
out
over
own
re
same
shan
she
should
shouldn
so
some
such
than
that
the
their
theirs
them
themselves
then
there
these
they
this
those
through
to
too
under
until
up
ve
very
was
wasn
we
were
weren
what
when
where
which
while
who
whom
why
will
with
won
wouldn
you
your
yours
yourself
yourselves
)";

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        words.push_back(line.substr(start));
    }
    return words;
}

}  // namespace

const std::string& default_stopword_text() {
    static const std::string text = kStopwordsRaw;
    return text;
}

const std::vector<std::string>& default_stopword_list() {
    static const std::vector<std::string> list = split_words(default_stopword_text());
    return list;
}

const std::unordered_set<std::string>& default_stopword_set() {
    static const std::unordered_set<std::string> set(default_stopword_list().begin(),
                                                     default_stopword_list().end());
    return set;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto words = split_words(buf.str());
    return {words.begin(), words.end()};
}

}  // namespace newsprop
